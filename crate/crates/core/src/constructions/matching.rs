use crate::error::{Error, Result};

use super::SimpleGraph;

/// Splits the edges of a d-regular graph into d perfect matchings (edge ids).
///
/// With `coloring` (a colour in 0..d per edge id) the colouring is checked to
/// be a proper d-edge-colouring and returned grouped by colour; this covers
/// non-bipartite graphs such as K_4. Without it the graph must be bipartite,
/// and matchings are peeled off one at a time with augmenting paths.
pub fn matching_decomposition(g: &SimpleGraph, coloring: Option<&[usize]>) -> Result<Vec<Vec<usize>>> {
    let d = g
        .regular_degree()
        .ok_or_else(|| Error::Precondition("graph is not regular".into()))?;
    if let Some(col) = coloring {
        return from_coloring(g, d, col);
    }
    let side = g
        .bipartition()
        .ok_or_else(|| Error::Precondition("graph is not bipartite and no colouring was supplied".into()))?;
    let mut alive = vec![true; g.edges().len()];
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        let m = perfect_matching(g, &side, &alive).ok_or_else(|| {
            Error::Precondition("no perfect matching in remaining regular bipartite graph".into())
        })?;
        for &e in &m {
            alive[e] = false;
        }
        out.push(m);
    }
    Ok(out)
}

fn from_coloring(g: &SimpleGraph, d: usize, col: &[usize]) -> Result<Vec<Vec<usize>>> {
    if col.len() != g.edges().len() {
        return Err(Error::Precondition("colouring does not cover every edge".into()));
    }
    let mut classes = vec![Vec::new(); d];
    let mut seen = vec![vec![false; d]; g.n()];
    for (e, &c) in col.iter().enumerate() {
        if c >= d {
            return Err(Error::Precondition(format!("colour {c} out of range 0..{d}")));
        }
        let (u, v) = g.edges()[e];
        for x in [u, v] {
            if std::mem::replace(&mut seen[x][c], true) {
                return Err(Error::Precondition(format!(
                    "improper colouring: colour {c} repeats at {}",
                    g.name(x)
                )));
            }
        }
        classes[c].push(e);
    }
    Ok(classes)
}

/// Kuhn's augmenting-path matching restricted to `alive` edges.
fn perfect_matching(g: &SimpleGraph, side: &[bool], alive: &[bool]) -> Option<Vec<usize>> {
    let n = g.n();
    let mut mate: Vec<Option<usize>> = vec![None; n];

    fn augment(
        g: &SimpleGraph,
        alive: &[bool],
        x: usize,
        seen: &mut [bool],
        mate: &mut [Option<usize>],
    ) -> bool {
        for &y in g.neighbors(x) {
            let e = g.edge_id(x, y).expect("adjacent");
            if !alive[e] || seen[y] {
                continue;
            }
            seen[y] = true;
            if mate[y].is_none_or(|w| augment(g, alive, w, seen, mate)) {
                mate[y] = Some(x);
                mate[x] = Some(y);
                return true;
            }
        }
        false
    }

    for x in (0..n).filter(|&x| !side[x]) {
        let mut seen = vec![false; n];
        if !augment(g, alive, x, &mut seen, &mut mate) {
            return None;
        }
    }
    let mut edges: Vec<usize> = (0..n)
        .filter(|&x| !side[x])
        .map(|x| g.edge_id(x, mate[x].expect("matched")).expect("adjacent"))
        .collect();
    edges.sort_unstable();
    (edges.len() * 2 == n).then_some(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{complete_bipartite, complete_graph, cycle_graph, petersen};

    fn check_partition(g: &SimpleGraph, ms: &[Vec<usize>]) {
        let mut used = vec![0; g.edges().len()];
        for m in ms {
            let mut cover = vec![0; g.n()];
            for &e in m {
                used[e] += 1;
                let (u, v) = g.edges()[e];
                cover[u] += 1;
                cover[v] += 1;
            }
            assert!(cover.iter().all(|&c| c == 1));
        }
        assert!(used.iter().all(|&u| u == 1));
    }

    #[test]
    fn k33_and_even_cycle() {
        let g = complete_bipartite(3, 3);
        let ms = matching_decomposition(&g, None).unwrap();
        assert_eq!(ms.len(), 3);
        assert!(ms.iter().all(|m| m.len() == 3));
        check_partition(&g, &ms);
        let c = cycle_graph(6);
        let ms = matching_decomposition(&c, None).unwrap();
        assert_eq!(ms.len(), 2);
        check_partition(&c, &ms);
    }

    #[test]
    fn non_bipartite_needs_coloring() {
        assert!(matches!(
            matching_decomposition(&petersen(), None),
            Err(Error::Precondition(_))
        ));
        let k4 = complete_graph(4, "v");
        // Edges in order 01 02 03 12 13 23.
        let col = [0, 1, 2, 2, 1, 0];
        let ms = matching_decomposition(&k4, Some(&col)).unwrap();
        check_partition(&k4, &ms);
        assert!(matching_decomposition(&k4, Some(&[0, 0, 1, 1, 2, 2])).is_err());
    }
}
