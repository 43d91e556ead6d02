//! File formats: subspaces (text), sets (text and SRL2 binary for p=2), and
//! witness/certificate files.

use crate::error::{Error, Result};
use crate::group::{GroupContext, Subspace};
use crate::set::SetIndicator;
use crate::stability::{CoverCertificate, OrderWitness, SetSide, TreeWitness};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Subspace text format: line 1 `p n d`, then d annihilator rows of n digits.
pub fn write_subspace(path: &Path, ctx: &GroupContext, h: &Subspace) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("{} {} {}\n", ctx.p(), ctx.n(), h.codim()));
    for row in h.annihilator_rows() {
        let digits: Vec<String> = row.iter().map(|d| d.to_string()).collect();
        out.push_str(&digits.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_subspace(path: &Path) -> Result<(GroupContext, Subspace)> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().ok_or_else(|| parse_err("empty subspace file"))??;
    let mut it = header.split_whitespace();
    let p: u8 = next_num(&mut it, "p")?;
    let n: usize = next_num(&mut it, "n")?;
    let d: usize = next_num(&mut it, "d")?;
    let ctx = GroupContext::new(p, n)?;
    let mut rows = Vec::with_capacity(d);
    for _ in 0..d {
        let line = lines.next().ok_or_else(|| parse_err("missing annihilator row"))??;
        rows.push(parse_digit_line(&line, n)?);
    }
    let indices: Vec<usize> = rows.iter().map(|r| ctx.index(r)).collect::<Result<_>>()?;
    let h = Subspace::from_annihilator_indices(&ctx, &indices)?;
    Ok((ctx, h))
}

fn next_num<T: std::str::FromStr>(it: &mut std::str::SplitWhitespace, what: &str) -> Result<T> {
    it.next()
        .ok_or_else(|| parse_err(format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(format!("invalid {what}")))
}

fn parse_digit_line(line: &str, n: usize) -> Result<Vec<u8>> {
    let digits: Vec<u8> = line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(format!("bad digit {t:?}"))))
        .collect::<Result<_>>()?;
    if digits.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: digits.len() });
    }
    Ok(digits)
}

/// Set text format: line 1 `p n`, optional `# source: ...` comment, then one
/// element per line as n digits.
pub fn write_set_text(path: &Path, ctx: &GroupContext, a: &SetIndicator) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", ctx.p(), ctx.n()));
    if let Some(tag) = a.source() {
        out.push_str(&format!("# source: {tag}\n"));
    }
    for x in a.members() {
        let digits: Vec<String> = ctx.digits(x)?.iter().map(|d| d.to_string()).collect();
        out.push_str(&digits.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_set_text(path: &Path) -> Result<(GroupContext, SetIndicator)> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().ok_or_else(|| parse_err("empty set file"))??;
    let mut it = header.split_whitespace();
    let p: u8 = next_num(&mut it, "p")?;
    let n: usize = next_num(&mut it, "n")?;
    let ctx = GroupContext::new(p, n)?;
    let mut a = SetIndicator::empty(&ctx);
    let mut source = None;
    for line in lines {
        let line = line?;
        if let Some(tag) = line.strip_prefix("# source: ") {
            source = Some(tag.to_string());
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        a.insert(ctx.index(&parse_digit_line(&line, n)?)?);
    }
    if let Some(tag) = source {
        a = a.with_source(tag);
    }
    Ok((ctx, a))
}

/// SRL2 binary format (p = 2 only): magic "SRL2", u32-le n, then
/// ceil(2^n/8) bytes of the bit array in codec order.
pub fn write_set_binary(path: &Path, ctx: &GroupContext, a: &SetIndicator) -> Result<()> {
    if ctx.p() != 2 {
        return Err(parse_err("SRL2 binary format requires p = 2"));
    }
    let mut out = std::fs::File::create(path)?;
    out.write_all(b"SRL2")?;
    out.write_all(&(ctx.n() as u32).to_le_bytes())?;
    let mut bytes = vec![0u8; ctx.order().div_ceil(8)];
    for x in a.members() {
        bytes[x >> 3] |= 1 << (x & 7);
    }
    out.write_all(&bytes)?;
    Ok(())
}

pub fn read_set_binary(path: &Path) -> Result<(GroupContext, SetIndicator)> {
    let mut file = std::fs::File::open(path)?;
    let mut magic = [0u8; 4];
    file.read_exact(&mut magic)?;
    if &magic != b"SRL2" {
        return Err(parse_err("bad magic, expected SRL2"));
    }
    let mut nb = [0u8; 4];
    file.read_exact(&mut nb)?;
    let n = u32::from_le_bytes(nb) as usize;
    let ctx = GroupContext::new(2, n)?;
    let mut bytes = vec![0u8; ctx.order().div_ceil(8)];
    file.read_exact(&mut bytes)?;
    let mut a = SetIndicator::empty(&ctx);
    for x in 0..ctx.order() {
        if bytes[x >> 3] >> (x & 7) & 1 == 1 {
            a.insert(x);
        }
    }
    Ok((ctx, a))
}

/// Auto-detect SRL2 binary vs text by the magic bytes.
pub fn read_set(path: &Path) -> Result<(GroupContext, SetIndicator)> {
    let mut file = std::fs::File::open(path)?;
    let mut magic = [0u8; 4];
    let got = file.read(&mut magic)?;
    drop(file);
    if got == 4 && &magic == b"SRL2" {
        read_set_binary(path)
    } else {
        read_set_text(path)
    }
}

/// Witness text formats.
///
/// Order witness: `order k [set|complement]`, optional source comment, then
/// k a-element lines and k b-element lines of n digits each.
/// Tree witness: `tree d`, then a line `eta <bits> <digits>` per leaf and
/// `node <heap> <digits>` per internal node.
pub fn write_order_witness(
    path: &Path,
    ctx: &GroupContext,
    w: &OrderWitness,
    side: SetSide,
    source: Option<&str>,
) -> Result<()> {
    let mut out = String::new();
    let side_tag = match side {
        SetSide::Set => "set",
        SetSide::Complement => "complement",
    };
    out.push_str(&format!("order {} {}\n", w.k, side_tag));
    if let Some(tag) = source {
        out.push_str(&format!("# source: {tag}\n"));
    }
    for &x in w.a.iter().chain(&w.b) {
        let digits: Vec<String> = ctx.digits(x)?.iter().map(|d| d.to_string()).collect();
        out.push_str(&digits.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_order_witness(path: &Path, ctx: &GroupContext) -> Result<(OrderWitness, SetSide)> {
    let file = std::fs::File::open(path)?;
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .collect();
    let header = lines.first().ok_or_else(|| parse_err("empty witness file"))?;
    let mut it = header.split_whitespace();
    if it.next() != Some("order") {
        return Err(parse_err("expected order witness header"));
    }
    let k: usize = next_num(&mut it, "k")?;
    let side = match it.next() {
        Some("set") | None => SetSide::Set,
        Some("complement") => SetSide::Complement,
        Some(other) => return Err(parse_err(format!("unknown side {other:?}"))),
    };
    if lines.len() != 1 + 2 * k {
        return Err(parse_err(format!("expected {} element lines, got {}", 2 * k, lines.len() - 1)));
    }
    let mut elems = Vec::with_capacity(2 * k);
    for line in &lines[1..] {
        elems.push(ctx.index(&parse_digit_line(line, ctx.n())?)?);
    }
    let b = elems.split_off(k);
    Ok((OrderWitness { k, a: elems, b }, side))
}

pub fn write_tree_witness(path: &Path, ctx: &GroupContext, tw: &TreeWitness, source: Option<&str>) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("tree {}\n", tw.d));
    if let Some(tag) = source {
        out.push_str(&format!("# source: {tag}\n"));
    }
    for (code, &x) in tw.leaves.iter().enumerate() {
        let bits: String = (0..tw.d).map(|s| if code >> (tw.d - 1 - s) & 1 == 1 { '1' } else { '0' }).collect();
        let digits: Vec<String> = ctx.digits(x)?.iter().map(|d| d.to_string()).collect();
        out.push_str(&format!("eta {} {}\n", if bits.is_empty() { "-".into() } else { bits }, digits.join(" ")));
    }
    for heap in 1..tw.nodes.len() {
        let digits: Vec<String> = ctx.digits(tw.nodes[heap])?.iter().map(|d| d.to_string()).collect();
        out.push_str(&format!("node {heap} {}\n", digits.join(" ")));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_tree_witness(path: &Path, ctx: &GroupContext) -> Result<TreeWitness> {
    let file = std::fs::File::open(path)?;
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .collect();
    let header = lines.first().ok_or_else(|| parse_err("empty witness file"))?;
    let mut it = header.split_whitespace();
    if it.next() != Some("tree") {
        return Err(parse_err("expected tree witness header"));
    }
    let d: usize = next_num(&mut it, "d")?;
    let leaf_count = 1usize << d;
    let mut leaves = vec![0usize; leaf_count];
    let mut nodes = vec![0usize; leaf_count];
    let mut seen_leaves = 0usize;
    let mut seen_nodes = 0usize;
    for line in &lines[1..] {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("eta") => {
                let bits = it.next().ok_or_else(|| parse_err("missing leaf path"))?;
                let code = if bits == "-" {
                    0
                } else {
                    usize::from_str_radix(bits, 2).map_err(|_| parse_err("bad leaf path"))?
                };
                let rest: Vec<&str> = it.collect();
                leaves[code] = ctx.index(&parse_digit_line(&rest.join(" "), ctx.n())?)?;
                seen_leaves += 1;
            }
            Some("node") => {
                let heap: usize = next_num(&mut it, "heap index")?;
                if heap == 0 || heap >= leaf_count {
                    return Err(parse_err(format!("heap index {heap} out of range")));
                }
                let rest: Vec<&str> = it.collect();
                nodes[heap] = ctx.index(&parse_digit_line(&rest.join(" "), ctx.n())?)?;
                seen_nodes += 1;
            }
            _ => return Err(parse_err(format!("unexpected line {line:?}"))),
        }
    }
    if seen_leaves != leaf_count || seen_nodes != leaf_count - 1 {
        return Err(Error::IncompleteTree { d, expected: leaf_count, got: seen_leaves.min(seen_nodes + 1) });
    }
    Ok(TreeWitness { d, leaves, nodes })
}

/// Cover certificate text format: `cover <side> <count>`, then the translate
/// elements one per line.
pub fn write_cover(path: &Path, ctx: &GroupContext, c: &CoverCertificate, source: Option<&str>) -> Result<()> {
    let mut out = String::new();
    let side_tag = match c.side {
        SetSide::Set => "set",
        SetSide::Complement => "complement",
    };
    out.push_str(&format!("cover {} {}\n", side_tag, c.translates.len()));
    if let Some(tag) = source {
        out.push_str(&format!("# source: {tag}\n"));
    }
    for &g in &c.translates {
        let digits: Vec<String> = ctx.digits(g)?.iter().map(|d| d.to_string()).collect();
        out.push_str(&digits.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_cover(path: &Path, ctx: &GroupContext) -> Result<CoverCertificate> {
    let file = std::fs::File::open(path)?;
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .collect();
    let header = lines.first().ok_or_else(|| parse_err("empty cover file"))?;
    let mut it = header.split_whitespace();
    if it.next() != Some("cover") {
        return Err(parse_err("expected cover header"));
    }
    let side = match it.next() {
        Some("set") => SetSide::Set,
        Some("complement") => SetSide::Complement,
        other => return Err(parse_err(format!("bad side {other:?}"))),
    };
    let count: usize = next_num(&mut it, "count")?;
    if lines.len() != 1 + count {
        return Err(parse_err("translate count mismatch"));
    }
    let translates = lines[1..]
        .iter()
        .map(|l| ctx.index(&parse_digit_line(l, ctx.n())?))
        .collect::<Result<_>>()?;
    Ok(CoverCertificate { side, translates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Subspace;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("srl-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn subspace_round_trip() {
        let ctx = GroupContext::new(3, 4).unwrap();
        let h = Subspace::from_annihilator_indices(&ctx, &[4, 10, 31]).unwrap();
        let path = tmp("h.sub");
        write_subspace(&path, &ctx, &h).unwrap();
        let (ctx2, h2) = read_subspace(&path).unwrap();
        assert_eq!(ctx, ctx2);
        assert_eq!(h, h2);
    }

    #[test]
    fn set_text_round_trip() {
        let ctx = GroupContext::new(5, 3).unwrap();
        let a = SetIndicator::from_members(&ctx, [0, 7, 12, 99, 124]).unwrap().with_source("demo");
        let path = tmp("a.set");
        write_set_text(&path, &ctx, &a).unwrap();
        let (ctx2, a2) = read_set(&path).unwrap();
        assert_eq!(ctx, ctx2);
        assert_eq!(a, a2);
        assert_eq!(a2.source(), Some("demo"));
    }

    #[test]
    fn set_binary_round_trip() {
        let ctx = GroupContext::new(2, 11).unwrap();
        let a = SetIndicator::from_members(&ctx, (0..2048).filter(|x| x % 7 == 3)).unwrap();
        let path = tmp("a.srl2");
        write_set_binary(&path, &ctx, &a).unwrap();
        let (ctx2, a2) = read_set(&path).unwrap();
        assert_eq!(ctx, ctx2);
        assert_eq!(a.len(), a2.len());
        assert_eq!(a.members().collect::<Vec<_>>(), a2.members().collect::<Vec<_>>());
        // binary refused for odd p
        let ctx3 = GroupContext::new(3, 3).unwrap();
        let b = SetIndicator::empty(&ctx3);
        assert!(write_set_binary(&tmp("b.srl2"), &ctx3, &b).is_err());
    }

    #[test]
    fn order_witness_round_trip() {
        let ctx = GroupContext::new(2, 4).unwrap();
        let w = OrderWitness { k: 3, a: vec![0, 6, 12], b: vec![1, 2, 4] };
        let path = tmp("w.order");
        write_order_witness(&path, &ctx, &w, SetSide::Set, Some("basis_set p=2 n=4")).unwrap();
        let (w2, side) = read_order_witness(&path, &ctx).unwrap();
        assert_eq!(w, w2);
        assert_eq!(side, SetSide::Set);
    }

    #[test]
    fn tree_witness_round_trip() {
        let ctx = GroupContext::new(2, 3).unwrap();
        let tw = TreeWitness { d: 2, leaves: vec![1, 2, 3, 4], nodes: vec![0, 5, 6, 7] };
        let path = tmp("w.tree");
        write_tree_witness(&path, &ctx, &tw, None).unwrap();
        let tw2 = read_tree_witness(&path, &ctx).unwrap();
        assert_eq!(tw, tw2);
    }

    #[test]
    fn cover_round_trip() {
        let ctx = GroupContext::new(2, 4).unwrap();
        let c = CoverCertificate { side: SetSide::Complement, translates: vec![0, 3, 9] };
        let path = tmp("c.cover");
        write_cover(&path, &ctx, &c, Some("tag")).unwrap();
        let c2 = read_cover(&path, &ctx).unwrap();
        assert_eq!(c, c2);
    }
}
