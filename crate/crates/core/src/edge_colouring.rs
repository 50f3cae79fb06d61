//! Proper edge colouring with at most `Delta + 1` colours (Misra-Gries form of
//! Vizing's theorem) and the matching read off its largest colour class.

use crate::pattern::PatternGraph;

/// Colour per edge id, in `0..=Delta`.
pub fn vizing_colouring(h: &PatternGraph) -> Vec<usize> {
    let n = h.n();
    let k = h.max_degree() + 1;
    // at[v][c] = neighbour joined to v by an edge of colour c
    let mut at = vec![vec![usize::MAX; k]; n];
    let mut colour = vec![usize::MAX; h.edge_count()];
    let free = |at: &Vec<Vec<usize>>, v: usize| (0..k).find(|&c| at[v][c] == usize::MAX).expect("a vertex of degree <= Delta has a free colour");
    let is_free = |at: &Vec<Vec<usize>>, v: usize, c: usize| at[v][c] == usize::MAX;

    for e in 0..h.edge_count() {
        let (u, v0) = h.edge(e);
        // maximal fan of u starting at v0
        let mut fan = vec![v0];
        let mut in_fan = vec![false; n];
        in_fan[v0] = true;
        loop {
            let last = *fan.last().unwrap();
            let next = h.neighbours(u).iter().copied().find(|&w| {
                if in_fan[w] {
                    return false;
                }
                let Some(id) = h.edge_id(u, w) else { return false };
                let c = colour[id];
                c != usize::MAX && is_free(&at, last, c)
            });
            match next {
                Some(w) => {
                    in_fan[w] = true;
                    fan.push(w);
                }
                None => break,
            }
        }
        let c = free(&at, u);
        let d = free(&at, *fan.last().unwrap());
        if c != d {
            // invert the cd-path starting at u
            let mut path = Vec::new();
            let mut x = u;
            let mut want = d;
            while at[x][want] != usize::MAX {
                let y = at[x][want];
                path.push((x, y));
                x = y;
                want = if want == d { c } else { d };
            }
            for &(a, b) in &path {
                let id = h.edge_id(a, b).unwrap();
                let old = colour[id];
                at[a][old] = usize::MAX;
                at[b][old] = usize::MAX;
            }
            for &(a, b) in &path {
                let id = h.edge_id(a, b).unwrap();
                let new = if colour[id] == c { d } else { c };
                colour[id] = new;
                at[a][new] = b;
                at[b][new] = a;
            }
        }
        // first fan vertex w with d free whose prefix is still a fan
        let w_pos = (0..fan.len())
            .find(|&w| {
                is_free(&at, fan[w], d)
                    && (0..w).all(|i| {
                        let ci = colour[h.edge_id(u, fan[i + 1]).unwrap()];
                        ci != usize::MAX && is_free(&at, fan[i], ci)
                    })
            })
            .expect("Misra-Gries: a fan prefix ending at a d-free vertex exists");
        // rotate the fan prefix up to w
        for i in 0..w_pos {
            let (a, b) = (fan[i], fan[i + 1]);
            let id_a = h.edge_id(u, a).unwrap();
            let id_b = h.edge_id(u, b).unwrap();
            let cb = colour[id_b];
            let ca = colour[id_a];
            if ca != usize::MAX {
                at[u][ca] = usize::MAX;
                at[a][ca] = usize::MAX;
            }
            at[u][cb] = usize::MAX;
            at[b][cb] = usize::MAX;
            colour[id_a] = cb;
            at[u][cb] = a;
            at[a][cb] = u;
            colour[id_b] = usize::MAX;
        }
        let w = fan[w_pos];
        let id_w = h.edge_id(u, w).unwrap();
        colour[id_w] = d;
        at[u][d] = w;
        at[w][d] = u;
    }
    colour
}

/// Largest colour class of a proper `(Delta + 1)`-edge-colouring, as edge ids.
/// Its size is at least `ceil(e(H) / (Delta + 1))`.
pub fn vizing_matching(h: &PatternGraph) -> Vec<usize> {
    if h.edge_count() == 0 {
        return Vec::new();
    }
    let col = vizing_colouring(h);
    let k = h.max_degree() + 1;
    let mut classes = vec![Vec::new(); k];
    for (e, &c) in col.iter().enumerate() {
        classes[c].push(e);
    }
    classes.into_iter().max_by_key(|c| c.len()).unwrap_or_default()
}

/// Colour classes sorted by decreasing size (ties by colour).
pub fn colour_classes(h: &PatternGraph) -> Vec<Vec<usize>> {
    let col = vizing_colouring(h);
    let k = h.max_degree() + 1;
    let mut classes = vec![Vec::new(); k];
    for (e, &c) in col.iter().enumerate() {
        classes[c].push(e);
    }
    classes.sort_by(|a, b| b.len().cmp(&a.len()));
    classes
}

pub fn is_proper(h: &PatternGraph, colour: &[usize]) -> bool {
    (0..h.n()).all(|v| {
        let mut seen = Vec::new();
        h.neighbours(v).iter().all(|&w| {
            let c = colour[h.edge_id(v, w).unwrap()];
            let fresh = !seen.contains(&c);
            seen.push(c);
            fresh
        })
    })
}
