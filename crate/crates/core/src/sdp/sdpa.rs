use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{Block, BlockKind, SdpInstance, Sense, SparseSym};

/// SDPA sparse text. Our problem is SDPA's dual form: F0 = C, F_k = A_k,
/// c_k = b_k. `≤` rows get a slack in an extra diagonal block; the
/// objective constant travels in a `*constant` comment.
pub fn write_sdpa(inst: &SdpInstance) -> String {
    let slacks = inst.constraints.iter().filter(|c| c.sense == Sense::Le).count();
    let mut blocks: Vec<Block> = inst.blocks.clone();
    if slacks > 0 {
        blocks.push(Block {
            kind: BlockKind::Diagonal,
            size: slacks,
        });
    }
    let mut s = String::from("\"ugcsp export\n");
    writeln!(s, "*constant {:e}", inst.constant).unwrap();
    writeln!(s, "{}", inst.constraints.len()).unwrap();
    writeln!(s, "{}", blocks.len()).unwrap();
    let sizes: Vec<String> = blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Psd => b.size.to_string(),
            BlockKind::Diagonal => format!("-{}", b.size),
        })
        .collect();
    writeln!(s, "{}", sizes.join(" ")).unwrap();
    let rhs: Vec<String> = inst.constraints.iter().map(|c| format!("{:e}", c.b)).collect();
    writeln!(s, "{}", rhs.join(" ")).unwrap();
    let put = |s: &mut String, k: usize, m: &SparseSym| {
        for &(blk, i, j, v) in m.entries() {
            if v != 0.0 {
                writeln!(s, "{k} {} {} {} {v:e}", blk + 1, i + 1, j + 1).unwrap();
            }
        }
    };
    put(&mut s, 0, &inst.objective);
    let mut slack = 0;
    for (k, c) in inst.constraints.iter().enumerate() {
        put(&mut s, k + 1, &c.a);
        if c.sense == Sense::Le {
            slack += 1;
            writeln!(s, "{} {} {slack} {slack} 1e0", k + 1, blocks.len()).unwrap();
        }
    }
    s
}

/// Reads SDPA sparse text; every row becomes an equality.
pub fn parse_sdpa(text: &str) -> Result<SdpInstance> {
    let mut constant = 0.0;
    let mut lines = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("*constant") {
            constant = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse(no + 1, "bad constant"))?;
        } else if !(line.is_empty() || line.starts_with('"') || line.starts_with('*')) {
            lines.push((no + 1, line.replace([',', '{', '}', '(', ')'], " ")));
        }
    }
    let mut it = lines.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| Error::parse(0, format!("missing {what}")));
    let num = |(no, l): &(usize, String)| -> Result<usize> {
        l.split_whitespace()
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(*no, "expected an integer"))
    };
    let m = num(&next("constraint count")?)?;
    let nblocks = num(&next("block count")?)?;
    let (no, sizes) = next("block sizes")?;
    let blocks: Vec<Block> = sizes
        .split_whitespace()
        .take(nblocks)
        .map(|t| {
            let v: i64 = t.parse().map_err(|_| Error::parse(no, format!("bad block size `{t}`")))?;
            Ok(Block {
                kind: if v < 0 { BlockKind::Diagonal } else { BlockKind::Psd },
                size: v.unsigned_abs() as usize,
            })
        })
        .collect::<Result<_>>()?;
    if blocks.len() != nblocks {
        return Err(Error::parse(no, "too few block sizes"));
    }
    let (no, rhs) = next("right-hand sides")?;
    let b: Vec<f64> = rhs
        .split_whitespace()
        .take(m)
        .map(|t| t.parse().map_err(|_| Error::parse(no, format!("bad value `{t}`"))))
        .collect::<Result<_>>()?;
    if b.len() != m {
        return Err(Error::parse(no, "too few right-hand sides"));
    }
    let mut inst = SdpInstance::new(blocks);
    inst.constant = constant;
    let mut mats = vec![SparseSym::new(); m];
    while let Ok((no, l)) = next("entry") {
        let t: Vec<&str> = l.split_whitespace().collect();
        let bad = || Error::parse(no, format!("bad entry `{l}`"));
        let [k, blk, i, j, v] = t[..] else {
            return Err(bad());
        };
        let idx = |s: &str| s.parse::<usize>().ok().filter(|&x| x > 0).map(|x| x - 1);
        let k: usize = k.parse().map_err(|_| bad())?;
        let (Some(blk), Some(i), Some(j)) = (idx(blk), idx(i), idx(j)) else {
            return Err(bad());
        };
        let v: f64 = v.parse().map_err(|_| bad())?;
        match k {
            0 => inst.objective.add(blk, i, j, v),
            k if k <= m => mats[k - 1].add(blk, i, j, v),
            _ => return Err(bad()),
        }
    }
    for (a, b) in mats.into_iter().zip(b) {
        inst.add_constraint(a, b, Sense::Eq);
    }
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::cycle_graph;
    use crate::sdp::{build_maxcut_sdp, WeightedGraph};

    #[test]
    fn maxcut_round_trip() {
        let inst = build_maxcut_sdp(&WeightedGraph::unit(cycle_graph(4)));
        let text = write_sdpa(&inst);
        assert!(text.contains("\n4\n1\n4\n"));
        assert_eq!(parse_sdpa(&text).unwrap(), inst);
    }

    #[test]
    fn inequalities_get_slack() {
        let mut inst = SdpInstance::new(vec![Block {
            kind: BlockKind::Psd,
            size: 2,
        }]);
        let mut a = SparseSym::new();
        a.add(0, 0, 0, 1.0);
        inst.add_constraint(a, 2.0, Sense::Le);
        let back = parse_sdpa(&write_sdpa(&inst)).unwrap();
        assert_eq!(back.blocks.len(), 2);
        assert_eq!(back.blocks[1].kind, BlockKind::Diagonal);
        assert!(parse_sdpa("1\n1\n2\n1.0\n1 1 3 3 1.0\n").is_err());
    }
}
