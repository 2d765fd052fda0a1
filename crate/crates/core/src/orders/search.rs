use std::sync::Arc;

use rayon::prelude::*;

use super::{cone_to_coset_order, conjugate_index, CosetError, Sign, SignAssignment};
use crate::ball::Ball;

const P: u8 = 1;
const N: u8 = 2;
const S: u8 = 4;
const ALL: u8 = P | N | S;

fn bit(s: Sign) -> u8 {
    match s {
        Sign::Pos => P,
        Sign::Neg => N,
        Sign::Star => S,
    }
}

fn swap_sign(d: u8) -> u8 {
    (d & S) | ((d & P) << 1) | ((d & N) >> 1)
}

#[derive(Clone, Debug, Default)]
pub struct Constraints {
    /// Elements with a prescribed sign; `Star` forces an element into C.
    pub forced: Vec<(usize, Sign)>,
    /// Require C to meet the ball only in the identity.
    pub trivial_c: bool,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub limit: usize,
    /// Abort after this many nodes; forces a sequential search.
    pub node_budget: Option<u64>,
    /// Explore top-level branches on the rayon pool.
    pub parallel: bool,
    /// Drop leaves whose cosets admit no left-invariant order.
    pub coset_check: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { limit: 1000, node_budget: None, parallel: false, coset_check: true }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Assignments in lexicographic order of (index, `+1 < -1 < *`).
    pub cones: Vec<SignAssignment>,
    /// More than `limit` assignments exist.
    pub truncated: bool,
    pub budget_exhausted: bool,
    /// Search-tree size; for an UNSAT outcome this is the refutation size and
    /// does not depend on scheduling.
    pub nodes: u64,
}

impl SearchOutcome {
    /// No assignment extends the constraints at this radius.
    pub fn is_unsat(&self) -> bool {
        self.cones.is_empty() && !self.budget_exhausted
    }
}

fn allowed(x: u8, y: u8, z: u8) -> bool {
    match (x, y) {
        (P, P) | (S, P) | (P, S) => z == P,
        (N, N) | (S, N) | (N, S) => z == N,
        (S, S) => z == S,
        _ => true,
    }
}

fn conjugation_allowed(c: u8, h: u8, z: u8) -> bool {
    c != S || h == z
}

/// Generalised arc consistency for a ternary constraint, indexed by the
/// three domains packed as `dx << 6 | dy << 3 | dz`.
fn revise_table(allowed: fn(u8, u8, u8) -> bool) -> Vec<[u8; 3]> {
    let mut t = vec![[0u8; 3]; 512];
    for dx in 0..8u8 {
        for dy in 0..8u8 {
            for dz in 0..8u8 {
                let mut out = [0u8; 3];
                for vx in [P, N, S].into_iter().filter(|v| dx & v != 0) {
                    for vy in [P, N, S].into_iter().filter(|v| dy & v != 0) {
                        for vz in [P, N, S].into_iter().filter(|v| dz & v != 0) {
                            if allowed(vx, vy, vz) {
                                out[0] |= vx;
                                out[1] |= vy;
                                out[2] |= vz;
                            }
                        }
                    }
                }
                t[(dx as usize) << 6 | (dy as usize) << 3 | dz as usize] = out;
            }
        }
    }
    t
}

struct Problem {
    /// `(x, y, xy)` for product constraints and `(c, h, c h c^-1)` for
    /// conjugation constraints, distinguished by `kind`.
    triples: Vec<[usize; 3]>,
    kind: Vec<u8>,
    watch: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
    tables: [Vec<[u8; 3]>; 2],
    ball: Arc<Ball>,
    coset_check: bool,
}

enum Frontier {
    Leaf(Vec<u8>),
    Open(Vec<u8>),
}

struct Run<'a> {
    problem: &'a Problem,
    cap: usize,
    budget: Option<u64>,
    nodes: u64,
    found: Vec<Vec<u8>>,
    exhausted: bool,
}

impl Problem {
    fn new(ball: &Arc<Ball>, coset_check: bool) -> Problem {
        let n = ball.len();
        let mut triples = Vec::new();
        let mut kind = Vec::new();
        let mut watch = vec![Vec::new(); n];
        let mut add = |t: [usize; 3], k: u8| {
            let [x, y, z] = t;
            let i = triples.len();
            triples.push(t);
            kind.push(k);
            watch[x].push(i);
            if y != x {
                watch[y].push(i);
            }
            if z != x && z != y {
                watch[z].push(i);
            }
        };
        for x in 0..n {
            for y in 0..n {
                if let Some(z) = ball.product(x, y) {
                    add([x, y, z], 0);
                }
            }
        }
        for c in 1..n {
            for h in 1..n {
                if let Some(z) = conjugate_index(ball, c, h) {
                    if z != h {
                        add([c, h, z], 1);
                    }
                }
            }
        }
        Problem {
            triples,
            kind,
            watch,
            inverse: (0..n).map(|i| ball.invert(i)).collect(),
            generators: ball.generator_elements(),
            tables: [revise_table(allowed), revise_table(conjugation_allowed)],
            ball: ball.clone(),
            coset_check,
        }
    }

    /// Restricts `d[e]` to `mask`, queueing `e` on change; false on wipe-out.
    fn restrict(&self, d: &mut [u8], e: usize, mask: u8, queue: &mut Vec<usize>) -> bool {
        let nd = d[e] & mask;
        if nd != d[e] {
            d[e] = nd;
            queue.push(e);
        }
        nd != 0
    }

    fn propagate(&self, d: &mut [u8], mut queue: Vec<usize>) -> bool {
        while let Some(e) = queue.pop() {
            let inv = self.inverse[e];
            if !self.restrict(d, inv, swap_sign(d[e]), &mut queue) {
                return false;
            }
            for &t in &self.watch[e] {
                let [x, y, z] = self.triples[t];
                let r = self.tables[self.kind[t] as usize][(d[x] as usize) << 6 | (d[y] as usize) << 3 | d[z] as usize];
                if !self.restrict(d, x, r[0], &mut queue)
                    || !self.restrict(d, y, r[1], &mut queue)
                    || !self.restrict(d, z, r[2], &mut queue)
                {
                    return false;
                }
            }
        }
        !self.generators.iter().all(|&g| d[g] == S)
    }

    /// Child state for `d[e] = v`, or `None` if propagation fails.
    fn child(&self, d: &[u8], e: usize, v: u8) -> Option<Vec<u8>> {
        let mut c = d.to_vec();
        c[e] = v;
        self.propagate(&mut c, vec![e]).then_some(c)
    }

    /// Final test on a fully assigned leaf. A failed linear extension is a
    /// finite obstruction; an exhausted extension budget keeps the leaf.
    fn accept(&self, d: &[u8]) -> bool {
        if !self.coset_check {
            return true;
        }
        let phi = to_assignment(&self.ball, d);
        !matches!(cone_to_coset_order(&phi), Err(CosetError::Inconsistent(..) | CosetError::NoExtension(..)))
    }

    fn branch_var(d: &[u8]) -> Option<usize> {
        d.iter().position(|&x| x.count_ones() > 1)
    }

    /// Expands the tree breadth-first in DFS order until it has `width` items.
    fn frontier(&self, root: Vec<u8>, width: usize, nodes: &mut u64) -> Vec<Frontier> {
        let mut items = vec![Frontier::Open(root)];
        for _ in 0..4 {
            if items.len() >= width {
                break;
            }
            let mut next = Vec::new();
            for item in items {
                match item {
                    Frontier::Open(d) => match Problem::branch_var(&d) {
                        None => next.push(Frontier::Leaf(d)),
                        Some(e) => {
                            for v in [P, N, S] {
                                if d[e] & v == 0 {
                                    continue;
                                }
                                *nodes += 1;
                                if let Some(c) = self.child(&d, e, v) {
                                    next.push(Frontier::Open(c));
                                }
                            }
                        }
                    },
                    leaf => next.push(leaf),
                }
            }
            items = next;
        }
        items
    }
}

impl Run<'_> {
    fn done(&self) -> bool {
        self.found.len() >= self.cap || self.exhausted
    }

    fn dfs(&mut self, d: Vec<u8>) {
        let Some(e) = Problem::branch_var(&d) else {
            if self.problem.accept(&d) {
                self.found.push(d);
            }
            return;
        };
        for v in [P, N, S] {
            if d[e] & v == 0 || self.done() {
                continue;
            }
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                self.exhausted = true;
                return;
            }
            if let Some(c) = self.problem.child(&d, e, v) {
                self.dfs(c);
            }
        }
    }
}

fn to_assignment(ball: &Arc<Ball>, d: &[u8]) -> SignAssignment {
    SignAssignment::from_fn(ball.clone(), |i| match d[i] {
        P => Some(Sign::Pos),
        N => Some(Sign::Neg),
        S => Some(Sign::Star),
        _ => unreachable!("leaves are fully assigned"),
    })
}

/// Enumerates sign assignments satisfying the cone conditions on every
/// in-ball product, with propagation through products and inverses.
pub fn search_cones(ball: &Arc<Ball>, constraints: &Constraints, options: &SearchOptions) -> SearchOutcome {
    let problem = Problem::new(ball, options.coset_check);
    let n = ball.len();
    let mut root = vec![ALL; n];
    root[0] = S;
    if constraints.trivial_c {
        root.iter_mut().skip(1).for_each(|x| *x &= P | N);
    }
    for &(e, s) in &constraints.forced {
        root[e] &= bit(s);
    }
    let cap = options.limit.saturating_add(1);
    let mut nodes = 1u64;
    let mut found: Vec<Vec<u8>> = Vec::new();
    let mut exhausted = false;
    if root.iter().all(|&x| x != 0) && problem.propagate(&mut root, (0..n).collect()) {
        if options.parallel && options.node_budget.is_none() {
            let width = 4 * rayon::current_num_threads();
            let items = problem.frontier(root, width, &mut nodes);
            let results: Vec<(Vec<Vec<u8>>, u64)> = items
                .into_par_iter()
                .map(|item| match item {
                    Frontier::Leaf(d) => (if problem.accept(&d) { vec![d] } else { vec![] }, 0),
                    Frontier::Open(d) => {
                        let mut run =
                            Run { problem: &problem, cap, budget: None, nodes: 0, found: Vec::new(), exhausted: false };
                        run.dfs(d);
                        (run.found, run.nodes)
                    }
                })
                .collect();
            for (f, k) in results {
                found.extend(f);
                nodes += k;
            }
        } else {
            let mut run =
                Run { problem: &problem, cap, budget: options.node_budget, nodes, found: Vec::new(), exhausted: false };
            run.dfs(root);
            nodes = run.nodes;
            found = run.found;
            exhausted = run.exhausted;
        }
    }
    let truncated = found.len() > options.limit;
    found.truncate(options.limit);
    let cones = found.iter().map(|d| to_assignment(ball, d)).collect();
    SearchOutcome { cones, truncated, budget_exhausted: exhausted, nodes }
}

#[cfg(test)]
mod tests {
    use super::super::tests::ball;
    use super::super::verify_relative_cone;
    use super::*;
    use crate::word::Letter;

    fn all(b: &Arc<Ball>, c: &Constraints) -> SearchOutcome {
        search_cones(b, c, &SearchOptions { limit: 100_000, ..Default::default() })
    }

    #[test]
    fn z_with_trivial_c_has_two_cones() {
        let b = ball("z", 3);
        let out = all(&b, &Constraints { trivial_c: true, ..Default::default() });
        assert_eq!(out.cones.len(), 2);
        assert!(!out.truncated);
    }

    #[test]
    fn contradictory_constraints_are_unsat() {
        let b = ball("z2", 2);
        let a = b.letter(Letter::new(0, false)).unwrap();
        let ai = b.letter(Letter::new(0, true)).unwrap();
        let out = all(&b, &Constraints { forced: vec![(a, Sign::Pos), (ai, Sign::Pos)], ..Default::default() });
        assert!(out.is_unsat());
        assert!(out.nodes >= 1);
    }

    #[test]
    fn klein_relative_to_a() {
        let b = ball("klein", 2);
        let a = b.letter(Letter::new(0, false)).unwrap();
        let out = all(&b, &Constraints { forced: vec![(a, Sign::Star)], ..Default::default() });
        assert!(out.cones.len() >= 2);
        for phi in &out.cones {
            assert_eq!(verify_relative_cone(phi), Ok(()));
        }
    }

    #[test]
    fn limit_truncates_in_order() {
        let b = ball("f2", 2);
        let full = all(&b, &Constraints::default());
        let cut = search_cones(&b, &Constraints::default(), &SearchOptions { limit: 3, ..Default::default() });
        assert!(cut.truncated);
        assert_eq!(cut.cones, full.cones[..3].to_vec());
    }

    #[test]
    fn parallel_matches_sequential() {
        let b = ball("klein", 2);
        let seq = all(&b, &Constraints::default());
        let par = search_cones(&b, &Constraints::default(), &SearchOptions { limit: 100_000, parallel: true, ..Default::default() });
        assert_eq!(seq.cones, par.cones);
        let unsat = Constraints { forced: vec![(1, Sign::Pos), (2, Sign::Pos)], ..Default::default() };
        assert_eq!(all(&b, &unsat).nodes, search_cones(&b, &unsat, &SearchOptions { parallel: true, ..Default::default() }).nodes);
    }

    #[test]
    fn node_budget_stops_search() {
        let b = ball("f2", 2);
        let out = search_cones(&b, &Constraints::default(), &SearchOptions { limit: 100_000, node_budget: Some(5), parallel: true, coset_check: true });
        assert!(out.budget_exhausted);
        assert!(!out.is_unsat());
    }
}
