//! Quadratic Energy gradual semantics.
//!
//! Strengths start at the base scores and are updated synchronously: every
//! argument's energy is read from the previous iterate, then all arguments
//! move at once. Iteration stops when the sup-norm change between two
//! iterates drops to the configured tolerance.

use std::collections::BTreeMap;

use crate::error::{QbafError, SolveError};
use crate::qbaf::{ArgumentId, Polarity, Qbaf};

/// Final (or intermediate) strength of every argument of a framework.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct StrengthMap(BTreeMap<ArgumentId, f64>);

impl StrengthMap {
    pub fn get(&self, id: &ArgumentId) -> Option<f64> {
        self.0.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ArgumentId, f64)> + '_ {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_map(&self) -> &BTreeMap<ArgumentId, f64> {
        &self.0
    }

    /// `argument,strength` CSV, nine decimals, natural id order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("argument,strength\n");
        for (id, v) in &self.0 {
            out.push_str(&format!("{id},{v:.9}\n"));
        }
        out
    }
}

impl FromIterator<(ArgumentId, f64)> for StrengthMap {
    fn from_iter<I: IntoIterator<Item = (ArgumentId, f64)>>(iter: I) -> Self {
        StrengthMap(iter.into_iter().collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Sup-norm change at or below which the iteration counts as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl SolverConfig {
    pub const DEFAULT_TOLERANCE: f64 = 1e-12;
    pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self, SolveError> {
        let cfg = SolverConfig {
            tolerance,
            max_iterations,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), SolveError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(SolveError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: Self::DEFAULT_TOLERANCE,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub strengths: StrengthMap,
    pub iterations_used: usize,
    pub converged: bool,
    /// Sup-norm change of the final iteration.
    pub last_delta: f64,
}

/// Supporters' total strength minus attackers' total strength.
pub fn energy(q: &Qbaf, strengths: &StrengthMap, alpha: &ArgumentId) -> Result<f64, QbafError> {
    if !q.contains(alpha) {
        return Err(QbafError::UnknownArgument(alpha.clone()));
    }
    let (mut support, mut attack) = (0.0, 0.0);
    for e in q.edges().iter().filter(|e| &e.target == alpha) {
        let s = strengths
            .get(&e.source)
            .ok_or_else(|| QbafError::UnknownArgument(e.source.clone()))?;
        match e.polarity {
            Polarity::Support => support += s,
            Polarity::Attack => attack += s,
        }
    }
    Ok(support - attack)
}

/// One application of the QE influence function to a base score.
#[inline]
pub fn qe_update(base: f64, energy: f64) -> f64 {
    let sq = energy * energy;
    let damped = sq / (1.0 + sq);
    if energy <= 0.0 {
        base - base * damped
    } else {
        base + (1.0 - base) * damped
    }
}

/// Runs the QE iteration on `q` to convergence.
pub fn solve_qe(q: &Qbaf, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    let net = Network::compile(q);
    let all_args = vec![true; net.len()];
    let all_edges = vec![true; net.edge_count()];
    let (values, iterations, delta) = net.solve_masked(&all_args, &all_edges, cfg)?;
    Ok(SolveOutcome {
        strengths: net.to_strengths(&values, &all_args),
        iterations_used: iterations,
        converged: true,
        last_delta: delta,
    })
}

/// Index-based view of a framework used by the solver.
///
/// Arguments are numbered in natural id order and edges in framework order,
/// so incoming edges of every argument are visited in ascending source order.
/// Masks select a sub-framework without rebuilding anything; the arithmetic
/// performed for a masked solve is identical to the one performed on the
/// correspondingly restricted framework.
#[derive(Clone, Debug)]
pub(crate) struct Network {
    ids: Vec<ArgumentId>,
    base: Vec<f64>,
    /// (source, target, polarity) per edge.
    edges: Vec<(usize, usize, Polarity)>,
    /// Edge indices entering each argument.
    incoming: Vec<Vec<usize>>,
}

impl Network {
    pub(crate) fn compile(q: &Qbaf) -> Network {
        let ids: Vec<ArgumentId> = q.arguments().cloned().collect();
        let index: BTreeMap<&ArgumentId, usize> =
            ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let base = q.base_scores().values().copied().collect();
        let edges: Vec<_> = q
            .edges()
            .iter()
            .map(|e| (index[&e.source], index[&e.target], e.polarity))
            .collect();
        let mut incoming = vec![Vec::new(); ids.len()];
        for (k, &(_, t, _)) in edges.iter().enumerate() {
            incoming[t].push(k);
        }
        for list in &mut incoming {
            list.sort_by_key(|&k| edges[k].0);
        }
        Network {
            ids,
            base,
            edges,
            incoming,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.ids.len()
    }

    pub(crate) fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub(crate) fn ids(&self) -> &[ArgumentId] {
        &self.ids
    }

    pub(crate) fn index_of(&self, id: &ArgumentId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    pub(crate) fn edge(&self, k: usize) -> (usize, usize, Polarity) {
        self.edges[k]
    }

    pub(crate) fn to_strengths(&self, values: &[f64], active: &[bool]) -> StrengthMap {
        self.ids
            .iter()
            .zip(values)
            .zip(active)
            .filter(|(_, &on)| on)
            .map(|((id, &v), _)| (id.clone(), v))
            .collect()
    }

    /// Solves the sub-framework made of active arguments and the active
    /// edges between them. Returns the iterate (inactive entries hold their
    /// base score), the iteration count, and the final sup-norm change.
    pub(crate) fn solve_masked(
        &self,
        active_args: &[bool],
        active_edges: &[bool],
        cfg: &SolverConfig,
    ) -> Result<(Vec<f64>, usize, f64), SolveError> {
        cfg.check()?;
        let n = self.len();
        let live: Vec<usize> = (0..n).filter(|&i| active_args[i]).collect();
        // Per live argument: (source, is_support) of edges that survive both masks.
        let inputs: Vec<Vec<(usize, bool)>> = live
            .iter()
            .map(|&i| {
                self.incoming[i]
                    .iter()
                    .filter(|&&k| active_edges[k])
                    .map(|&k| self.edges[k])
                    .filter(|&(s, _, _)| active_args[s])
                    .map(|(s, _, p)| (s, p == Polarity::Support))
                    .collect()
            })
            .collect();

        let mut current = self.base.clone();
        let mut next = current.clone();
        let mut delta = 0.0;
        for iteration in 1..=cfg.max_iterations {
            delta = 0.0f64;
            for (slot, &i) in live.iter().enumerate() {
                let (mut support, mut attack) = (0.0, 0.0);
                for &(s, is_support) in &inputs[slot] {
                    if is_support {
                        support += current[s];
                    } else {
                        attack += current[s];
                    }
                }
                let v = qe_update(self.base[i], support - attack);
                delta = delta.max((v - current[i]).abs());
                next[i] = v;
            }
            std::mem::swap(&mut current, &mut next);
            if delta <= cfg.tolerance {
                return Ok((current, iteration, delta));
            }
        }
        Err(SolveError::NonConvergence {
            iterations: cfg.max_iterations,
            tolerance: cfg.tolerance,
            last_delta: delta,
            last_iterate: self.to_strengths(&current, active_args),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::quartet;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn id(s: &str) -> ArgumentId {
        ArgumentId::new(s).unwrap()
    }

    #[test]
    fn energy_matches_worked_example() {
        let q = quartet();
        let tau: StrengthMap = q.base_scores().clone().into_iter().collect();
        assert_abs_diff_eq!(
            energy(&q, &tau, &id("delta")).unwrap(),
            0.3,
            epsilon = 1e-15
        );
        assert_eq!(energy(&q, &tau, &id("beta")).unwrap(), 0.0);

        let mut s = q.base_scores().clone();
        s.insert(id("delta"), 0.72);
        let s: StrengthMap = s.into_iter().collect();
        assert_abs_diff_eq!(energy(&q, &s, &id("alpha")).unwrap(), 1.02, epsilon = 1e-15);
        assert!(energy(&q, &s, &id("omega")).is_err());
    }

    #[test]
    fn update_branches() {
        assert_abs_diff_eq!(
            qe_update(0.7, 0.3),
            0.7 + 0.3 * (0.09 / 1.09),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(qe_update(0.7, 0.3), 0.7248, epsilon = 1e-4);
        assert_eq!(qe_update(0.5, 0.0), 0.5);
        assert_eq!(qe_update(1.0, -1.0), 0.5);
        assert_eq!(qe_update(0.0, -3.0), 0.0);
        assert_eq!(qe_update(1.0, 3.0), 1.0);
    }

    #[test]
    fn quartet_strengths() {
        let out = solve_qe(&quartet(), &SolverConfig::default()).unwrap();
        let s = &out.strengths;
        assert_eq!(s.get(&id("beta")), Some(0.6));
        assert_eq!(s.get(&id("gamma")), Some(0.9));
        assert_abs_diff_eq!(s.get(&id("delta")).unwrap(), 0.72, epsilon = 0.005);
        assert_abs_diff_eq!(s.get(&id("alpha")).unwrap(), 0.90, epsilon = 0.005);
        assert!(out.converged);
        assert!(out.last_delta <= 1e-12);
    }

    #[test]
    fn edgeless_converges_in_one_iteration() {
        let q = Qbaf::builder()
            .argument("a", 0.3)
            .argument("b", 0.9)
            .build()
            .unwrap();
        let out = solve_qe(&q, &SolverConfig::default()).unwrap();
        assert_eq!(out.iterations_used, 1);
        assert_eq!(out.strengths.get(&id("a")), Some(0.3));
        assert_eq!(out.strengths.get(&id("b")), Some(0.9));
    }

    #[test]
    fn empty_framework() {
        let out = solve_qe(&Qbaf::empty(), &SolverConfig::default()).unwrap();
        assert!(out.strengths.is_empty());
    }

    /// Bisection on x = 0.5 + 0.5 x^2 / (1 + x^2) over (0.5, 1).
    fn mutual_support_oracle() -> f64 {
        let g = |x: f64| 0.5 + 0.5 * x * x / (1.0 + x * x) - x;
        let (mut lo, mut hi) = (0.5, 1.0);
        assert!(g(lo) > 0.0 && g(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn mutual_support_matches_scalar_fixed_point() {
        let q = Qbaf::builder()
            .argument("a", 0.5)
            .argument("b", 0.5)
            .support("a", "b")
            .support("b", "a")
            .build()
            .unwrap();
        let out = solve_qe(&q, &SolverConfig::default()).unwrap();
        let a = out.strengths.get(&id("a")).unwrap();
        let b = out.strengths.get(&id("b")).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.5 && a < 1.0);
        assert_abs_diff_eq!(a, mutual_support_oracle(), epsilon = 1e-10);
    }

    #[test]
    fn single_iteration_cap_reports_delta() {
        let cfg = SolverConfig::new(1e-12, 1).unwrap();
        match solve_qe(&quartet(), &cfg) {
            Err(SolveError::NonConvergence {
                iterations,
                last_delta,
                last_iterate,
                ..
            }) => {
                assert_eq!(iterations, 1);
                assert!(last_delta > 1e-12);
                assert_eq!(last_iterate.len(), 4);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn bad_configs() {
        assert!(SolverConfig::new(0.0, 10).is_err());
        assert!(SolverConfig::new(-1.0, 10).is_err());
        assert!(SolverConfig::new(f64::NAN, 10).is_err());
        assert!(SolverConfig::new(1e-9, 0).is_err());
    }

    #[test]
    fn strength_csv_format() {
        let out = solve_qe(&quartet(), &SolverConfig::default()).unwrap();
        let csv = out.strengths.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "argument,strength");
        assert!(lines[1].starts_with("alpha,0.90"));
        assert_eq!(lines[2], "beta,0.600000000");
        assert_eq!(lines.len(), 5);
    }

    /// Random acyclic frameworks: edges only go from lower to higher index.
    fn acyclic_qbaf() -> impl Strategy<Value = Qbaf> {
        (1usize..8).prop_flat_map(|n| {
            let scores = prop::collection::vec(0.0f64..=1.0, n);
            let edges = prop::collection::vec((0..n, 0..n, any::<bool>()), 0..(n * 2));
            (scores, edges).prop_map(|(scores, edges)| {
                let mut b = Qbaf::builder();
                for (i, s) in scores.iter().enumerate() {
                    b = b.argument(&format!("a{i}"), *s);
                }
                let mut seen = std::collections::BTreeSet::new();
                for (x, y, sup) in edges {
                    let (lo, hi) = (x.min(y), x.max(y));
                    if lo == hi || !seen.insert((lo, hi)) {
                        continue;
                    }
                    let (s, t) = (format!("a{lo}"), format!("a{hi}"));
                    b = if sup {
                        b.support(&s, &t)
                    } else {
                        b.attack(&s, &t)
                    };
                }
                b.build().unwrap()
            })
        })
    }

    /// Strengths of an acyclic framework in one pass over a topological order.
    fn topological_oracle(q: &Qbaf) -> BTreeMap<ArgumentId, f64> {
        let n = q.num_arguments();
        let mut out: BTreeMap<ArgumentId, f64> = BTreeMap::new();
        for i in 0..n {
            let a = id(&format!("a{i}"));
            let mut e = 0.0;
            for edge in q.edges().iter().filter(|x| x.target == a) {
                let s = out[&edge.source];
                e += if edge.polarity == Polarity::Support {
                    s
                } else {
                    -s
                };
            }
            out.insert(a.clone(), qe_update(q.base_score(&a).unwrap(), e));
        }
        out
    }

    proptest! {
        #[test]
        fn acyclic_matches_topological_pass(q in acyclic_qbaf()) {
            let out = solve_qe(&q, &SolverConfig::default()).unwrap();
            let oracle = topological_oracle(&q);
            for (a, v) in out.strengths.iter() {
                prop_assert!((v - oracle[a]).abs() < 1e-9, "{a}: {v} vs {}", oracle[a]);
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn parentless_keep_base_score(q in acyclic_qbaf()) {
            let out = solve_qe(&q, &SolverConfig::default()).unwrap();
            for a in q.arguments() {
                if !q.edges().iter().any(|e| &e.target == a) {
                    prop_assert_eq!(out.strengths.get(a), q.base_score(a));
                }
            }
        }

        #[test]
        fn looser_tolerance_stops_no_later(q in acyclic_qbaf(), exp in 3i32..12) {
            let tight = solve_qe(&q, &SolverConfig::new(1e-12, 10_000).unwrap()).unwrap();
            let loose = solve_qe(&q, &SolverConfig::new(10f64.powi(-exp), 10_000).unwrap()).unwrap();
            prop_assert!(loose.iterations_used <= tight.iterations_used);
            let again = solve_qe(&q, &SolverConfig::default()).unwrap();
            prop_assert_eq!(again, tight);
        }
    }
}
