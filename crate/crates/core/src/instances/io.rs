//! Line-oriented text formats. `#` starts a comment.
//!
//! ```text
//! gug m=<int>
//! vertex <name>
//! bundle <u> <v> <hex>,<hex>,...
//!
//! pug q=<int>
//! vertex <name>
//! edge <u> <v> perm=<i0>,<i1>,...        # a(u) = perm[a(v)]
//!
//! csp q=<int>
//! vertex <name>
//! ctype <id> arity=<k> sat=<t>;<t>;...   # tuples comma-separated
//! apply <ctype> <v1> .. <vk> w=<num>/<den>
//!
//! assign <vertex> <label>
//! ```
//!
//! `vertex` lines are optional (endpoints are declared on first use) but
//! writers always emit them so isolated vertices and vertex order survive a
//! round trip. Repeated `apply` lines on the same type and tuple are merged by
//! summing their weights; repeated `bundle` lines on the same pair are merged
//! by set union.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;

use super::{parse_ratio, ratio_to_string, Assignment, GroupUgInstance, PermUgInstance, WeightedCspInstance};

/// Any of the three instance kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Group(GroupUgInstance),
    Perm(PermUgInstance),
    Csp(WeightedCspInstance),
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn keyval<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| Error::parse(line, format!("expected `{key}=...`, got `{tok}`")))
}

fn parse_u32(s: &str, line: usize) -> Result<u32> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("expected an integer, got `{s}`")))
}

fn wrap<T>(r: Result<T>, line: usize) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidParameter(msg) => Error::parse(line, msg),
        other => other,
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let first = lines(text)
        .next()
        .ok_or_else(|| Error::parse(1, "empty instance file"))?;
    match first.1[0] {
        "gug" => parse_gug(text).map(Instance::Group),
        "pug" => parse_pug(text).map(Instance::Perm),
        "csp" => parse_csp(text).map(Instance::Csp),
        other => Err(Error::parse(first.0, format!("unknown header `{other}`"))),
    }
}

pub fn write_instance(inst: &Instance) -> String {
    match inst {
        Instance::Group(g) => write_gug(g),
        Instance::Perm(p) => write_pug(p),
        Instance::Csp(c) => write_csp(c),
    }
}

pub fn parse_gug(text: &str) -> Result<GroupUgInstance> {
    let mut it = lines(text);
    let (l0, head) = it.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    if head.len() != 2 || head[0] != "gug" {
        return Err(Error::parse(l0, "expected `gug m=<int>` header"));
    }
    let m = parse_u32(keyval(head[1], "m", l0)?, l0)?;
    let mut inst = wrap(GroupUgInstance::new(m), l0)?;
    for (ln, toks) in it {
        match toks.as_slice() {
            ["vertex", name] => {
                wrap(inst.add_vertex(name), ln)?;
            }
            ["bundle", u, v, diffs] => {
                let diffs = diffs
                    .split(',')
                    .map(|h| wrap(Gf2Vector::from_hex(h, m), ln))
                    .collect::<Result<Vec<_>>>()?;
                wrap(inst.add_bundle_by_name(u, v, &diffs), ln)?;
            }
            _ => return Err(Error::parse(ln, format!("unrecognized record `{}`", toks.join(" ")))),
        }
    }
    Ok(inst)
}

pub fn write_gug(inst: &GroupUgInstance) -> String {
    let mut s = format!("gug m={}\n", inst.m());
    for n in inst.names() {
        writeln!(s, "vertex {n}").unwrap();
    }
    for b in inst.bundles() {
        let diffs: Vec<String> = b.diffs.iter().map(|d| d.to_hex()).collect();
        writeln!(
            s,
            "bundle {} {} {}",
            inst.vertex_name(b.u),
            inst.vertex_name(b.v),
            diffs.join(",")
        )
        .unwrap();
    }
    s
}

pub fn parse_pug(text: &str) -> Result<PermUgInstance> {
    let mut it = lines(text);
    let (l0, head) = it.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    if head.len() != 2 || head[0] != "pug" {
        return Err(Error::parse(l0, "expected `pug q=<int>` header"));
    }
    let q = parse_u32(keyval(head[1], "q", l0)?, l0)?;
    let mut inst = wrap(PermUgInstance::new(q), l0)?;
    for (ln, toks) in it {
        match toks.as_slice() {
            ["vertex", name] => {
                wrap(inst.add_vertex(name), ln)?;
            }
            ["edge", u, v, perm] => {
                let perm = keyval(perm, "perm", ln)?
                    .split(',')
                    .map(|x| parse_u32(x, ln))
                    .collect::<Result<Vec<_>>>()?;
                wrap(inst.add_constraint_by_name(u, v, perm), ln)?;
            }
            _ => return Err(Error::parse(ln, format!("unrecognized record `{}`", toks.join(" ")))),
        }
    }
    Ok(inst)
}

pub fn write_pug(inst: &PermUgInstance) -> String {
    let mut s = format!("pug q={}\n", inst.q());
    for n in inst.names() {
        writeln!(s, "vertex {n}").unwrap();
    }
    for c in inst.constraints() {
        let perm: Vec<String> = c.perm.iter().map(u32::to_string).collect();
        writeln!(
            s,
            "edge {} {} perm={}",
            inst.names()[c.u],
            inst.names()[c.v],
            perm.join(",")
        )
        .unwrap();
    }
    s
}

pub fn parse_csp(text: &str) -> Result<WeightedCspInstance> {
    let mut it = lines(text);
    let (l0, head) = it.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    if head.len() != 2 || head[0] != "csp" {
        return Err(Error::parse(l0, "expected `csp q=<int>` header"));
    }
    let q = parse_u32(keyval(head[1], "q", l0)?, l0)?;
    let mut inst = wrap(WeightedCspInstance::new(q), l0)?;
    for (ln, toks) in it {
        match toks.as_slice() {
            ["vertex", name] => {
                wrap(inst.add_variable(name), ln)?;
            }
            ["ctype", id, arity, sat] => {
                let arity = parse_u32(keyval(arity, "arity", ln)?, ln)? as usize;
                let body = keyval(sat, "sat", ln)?;
                let mut tuples = BTreeSet::new();
                for t in body.split(';').filter(|t| !t.is_empty()) {
                    let t = t
                        .split(',')
                        .map(|x| parse_u32(x, ln))
                        .collect::<Result<Vec<_>>>()?;
                    tuples.insert(t);
                }
                wrap(inst.add_ctype(id, arity, tuples), ln)?;
            }
            ["apply", ctype, rest @ ..] if !rest.is_empty() => {
                let (w, vars) = rest.split_last().expect("nonempty");
                let weight = wrap(parse_ratio(keyval(w, "w", ln)?), ln)?;
                let t = inst
                    .ctype_index(ctype)
                    .ok_or_else(|| Error::parse(ln, format!("unknown ctype `{ctype}`")))?;
                let vars = vars
                    .iter()
                    .map(|v| wrap(inst.add_variable(v), ln))
                    .collect::<Result<Vec<_>>>()?;
                wrap(inst.add_application(t, vars, weight), ln)?;
            }
            _ => return Err(Error::parse(ln, format!("unrecognized record `{}`", toks.join(" ")))),
        }
    }
    Ok(inst)
}

pub fn write_csp(inst: &WeightedCspInstance) -> String {
    let mut s = format!("csp q={}\n", inst.q());
    for n in inst.names() {
        writeln!(s, "vertex {n}").unwrap();
    }
    for c in inst.ctypes() {
        let tuples: Vec<String> = c
            .sat
            .iter()
            .map(|t| t.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            .collect();
        writeln!(s, "ctype {} arity={} sat={}", c.id, c.arity, tuples.join(";")).unwrap();
    }
    for a in inst.applications() {
        let vars: Vec<&str> = a.vars.iter().map(|&v| inst.names()[v].as_str()).collect();
        let w = &a.weight;
        writeln!(
            s,
            "apply {} {} w={}/{}",
            inst.ctypes()[a.ctype].id,
            vars.join(" "),
            w.numer(),
            w.denom()
        )
        .unwrap();
    }
    s
}

/// Parses `assign` lines against a vertex list; `parse_label` decodes one label.
pub fn parse_assignment<L: Clone>(
    text: &str,
    names: &[String],
    mut parse_label: impl FnMut(&str) -> Result<L>,
) -> Result<Assignment<L>> {
    let index: std::collections::HashMap<&str, usize> =
        names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut a = Assignment::empty(names.len());
    for (ln, toks) in lines(text) {
        match toks.as_slice() {
            ["assign", v, label] => {
                let &i = index
                    .get(v)
                    .ok_or_else(|| Error::parse(ln, format!("unknown vertex `{v}`")))?;
                a.set(i, wrap(parse_label(label), ln)?);
            }
            _ => return Err(Error::parse(ln, format!("unrecognized record `{}`", toks.join(" ")))),
        }
    }
    Ok(a)
}

pub fn write_assignment<L>(names: &[String], labels: &[L], mut show: impl FnMut(&L) -> String) -> String {
    let mut s = String::new();
    for (n, l) in names.iter().zip(labels) {
        writeln!(s, "assign {n} {}", show(l)).unwrap();
    }
    s
}

pub fn write_group_assignment(inst: &GroupUgInstance, labels: &[Gf2Vector]) -> String {
    write_assignment(inst.names(), labels, |g| g.to_hex())
}

pub fn parse_group_assignment(text: &str, inst: &GroupUgInstance) -> Result<Assignment<Gf2Vector>> {
    let m = inst.m();
    parse_assignment(text, inst.names(), |s| Gf2Vector::from_hex(s, m))
}

pub fn parse_int_assignment(text: &str, names: &[String]) -> Result<Assignment<u32>> {
    parse_assignment(text, names, |s| {
        s.parse()
            .map_err(|_| Error::InvalidParameter(format!("bad label `{s}`")))
    })
}

/// `p/q` text of an exact ratio.
pub fn show_ratio(r: &super::ExactRatio) -> String {
    ratio_to_string(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GUG: &str = "# two vertices\ngug m=3\nvertex a\nvertex b\nvertex lonely\nbundle a b 1,6 # comment\nbundle b a 7\n";

    #[test]
    fn gug_round_trip() {
        let g = parse_gug(GUG).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.constraint_count(), 3);
        let again = parse_gug(&write_gug(&g)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn pug_round_trip_and_errors() {
        let text = "pug q=3\nedge x y perm=2,0,1\n";
        let p = parse_pug(text).unwrap();
        assert_eq!(parse_pug(&write_pug(&p)).unwrap(), p);
        let err = parse_pug("pug q=3\nedge x y perm=0,0,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn csp_round_trip_merges_duplicates() {
        let text = "csp q=2\nctype cut arity=2 sat=0,1;1,0\nctype never arity=1 sat=\napply cut a b w=1/3\napply cut a b w=1/6\napply never a w=-1/2\n";
        let c = parse_csp(text).unwrap();
        assert_eq!(c.applications().len(), 2);
        assert_eq!(c.applications()[0].weight, crate::instances::ratio(1, 2));
        assert_eq!(parse_csp(&write_csp(&c)).unwrap(), c);
    }

    #[test]
    fn assignment_round_trip() {
        let g = parse_gug(GUG).unwrap();
        let labels = vec![Gf2Vector::new(5, 3).unwrap(); 3];
        let text = write_group_assignment(&g, &labels);
        let a = parse_group_assignment(&text, &g).unwrap();
        assert_eq!(a.require_total(g.names()).unwrap(), labels);
        assert!(parse_group_assignment("assign nobody 1\n", &g).is_err());
    }

    #[test]
    fn header_dispatch() {
        assert!(matches!(parse_instance(GUG).unwrap(), Instance::Group(_)));
        assert!(parse_instance("graph\n").is_err());
    }
}
