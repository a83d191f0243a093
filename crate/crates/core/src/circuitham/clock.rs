//! Clock specifications and their invariant subspaces.
//!
//! A clock is a set of labelled basis states with a deterministic
//! transition map. Its undirected transition graph is a disjoint union of
//! paths and cycles; each connected component spans a subspace left
//! invariant by the Hamiltonian. The component containing label 0 is the
//! valid computation path and carries the circuit's gates.

use super::complex::CMatrix;
use super::unionfind::UnionFind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClockSpec {
    labels: Vec<String>,
    rules: Vec<(usize, usize)>,
    illegal: Vec<bool>,
    t_init: usize,
    input_penalties: Vec<(usize, CMatrix)>,
    reach: Option<usize>,
    next: Vec<Option<usize>>,
    prev: Vec<Option<usize>>,
    valid_path: Vec<usize>,
    /// Asserted, not checked: the final state and the `t < T_init` region
    /// are recognisable by a local projector.
    pub detectable_final_state: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceKind {
    IllegalOnly,
    Mixed,
    LegalOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    /// Label indices in walk order.
    pub labels: Vec<usize>,
    pub kind: SubspaceKind,
    pub cycle: bool,
    pub valid_path: bool,
    /// Largest distance from a legal label to the nearest illegal one;
    /// `None` unless the component is mixed.
    pub reach: Option<usize>,
}

/// A side path of the synthetic clock, disconnected from the valid path.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBranch {
    pub len: usize,
    /// 0-based positions along the branch.
    pub illegal: Vec<usize>,
    pub cycle: bool,
}

impl ClockSpec {
    /// `illegal` and the input-penalty times index into `labels`/the valid
    /// path respectively. An empty `input_penalties` means the default
    /// ancilla projector at every `t < t_init`.
    pub fn new(
        labels: Vec<String>,
        rules: Vec<(usize, usize)>,
        illegal: &[usize],
        t_init: usize,
        input_penalties: Vec<(usize, CMatrix)>,
        reach: Option<usize>,
    ) -> Result<Self> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::InvalidClock("need at least 2 labels".into()));
        }
        for i in 0..n {
            if labels[i + 1..].contains(&labels[i]) {
                return Err(Error::InvalidClock(format!(
                    "duplicate label {}",
                    labels[i]
                )));
            }
        }
        let mut next = vec![None; n];
        let mut prev = vec![None; n];
        for &(a, b) in &rules {
            if a >= n || b >= n {
                return Err(Error::InvalidClock(format!("rule {a}->{b} out of range")));
            }
            if a == b {
                return Err(Error::InvalidClock(format!("self-loop on {}", labels[a])));
            }
            if next[a].is_some() {
                return Err(Error::InvalidClock(format!(
                    "two forward rules from {}",
                    labels[a]
                )));
            }
            if prev[b].is_some() {
                return Err(Error::InvalidClock(format!(
                    "two backward rules into {}",
                    labels[b]
                )));
            }
            next[a] = Some(b);
            prev[b] = Some(a);
        }
        let mut ill = vec![false; n];
        for &i in illegal {
            if i >= n {
                return Err(Error::InvalidClock(format!(
                    "illegal label {i} out of range"
                )));
            }
            ill[i] = true;
        }

        if prev[0].is_some() {
            return Err(Error::InvalidClock(format!(
                "start label {} has a backward transition",
                labels[0]
            )));
        }
        let mut valid_path = vec![0];
        let mut cur = 0;
        while let Some(nx) = next[cur] {
            valid_path.push(nx);
            cur = nx;
        }
        if valid_path.len() < 2 {
            return Err(Error::InvalidClock("valid path has no transitions".into()));
        }
        if let Some(&bad) = valid_path.iter().find(|&&l| ill[l]) {
            return Err(Error::InvalidClock(format!(
                "valid path contains illegal label {}",
                labels[bad]
            )));
        }
        if t_init >= valid_path.len() {
            return Err(Error::InvalidClock(format!(
                "t_init {t_init} must be below path length {}",
                valid_path.len()
            )));
        }
        for (t, p) in &input_penalties {
            if *t >= t_init {
                return Err(Error::InvalidClock(format!(
                    "input penalty at t = {t} is not before t_init = {t_init}"
                )));
            }
            let d = p.projector_defect();
            if d > 1e-11 {
                return Err(Error::NotAProjector(format!(
                    "input penalty at t = {t} (defect {d:e})"
                )));
            }
        }

        let spec = Self {
            labels,
            rules,
            illegal: ill,
            t_init,
            input_penalties,
            reach,
            next,
            prev,
            valid_path,
            detectable_final_state: true,
        };
        for s in spec.invariant_partition() {
            if s.kind == SubspaceKind::LegalOnly && !s.valid_path {
                return Err(Error::InvalidClock(format!(
                    "legal-only component {:?} is not the valid path",
                    s.labels
                        .iter()
                        .map(|&l| &spec.labels[l])
                        .collect::<Vec<_>>()
                )));
            }
            if let (Some(limit), Some(r)) = (reach, s.reach) {
                if r > limit {
                    return Err(Error::InvalidClock(format!(
                        "mixed component starting at {} has reach {r} > {limit}",
                        spec.labels[s.labels[0]]
                    )));
                }
            }
        }
        Ok(spec)
    }

    /// Plain path `0 → 1 → ⋯ → T−1`.
    pub fn linear(t: usize, t_init: usize) -> Result<Self> {
        let labels = (0..t).map(|i| i.to_string()).collect();
        let rules = (0..t.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Self::new(labels, rules, &[], t_init, vec![], None)
    }

    /// Linear valid path with `T_init = ⌈√T⌉` plus disconnected side
    /// branches that contain illegal labels.
    pub fn dynamic_init(t: usize, branches: &[MixedBranch]) -> Result<Self> {
        let t_init = (t as f64).sqrt().ceil() as usize;
        let mut labels: Vec<String> = (0..t).map(|i| i.to_string()).collect();
        let mut rules: Vec<(usize, usize)> = (0..t.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        let mut illegal = Vec::new();
        for (b, br) in branches.iter().enumerate() {
            if br.len == 0 || br.illegal.is_empty() {
                return Err(Error::InvalidClock(format!(
                    "branch {b} needs at least one label and one illegal label"
                )));
            }
            let base = labels.len();
            labels.extend((0..br.len).map(|j| format!("b{b}.{j}")));
            rules.extend((0..br.len - 1).map(|j| (base + j, base + j + 1)));
            if br.cycle && br.len > 2 {
                rules.push((base + br.len - 1, base));
            }
            for &p in &br.illegal {
                if p >= br.len {
                    return Err(Error::InvalidClock(format!(
                        "branch {b} illegal position {p} out of range"
                    )));
                }
                illegal.push(base + p);
            }
        }
        Self::new(labels, rules, &illegal, t_init, vec![], None)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn rules(&self) -> &[(usize, usize)] {
        &self.rules
    }

    pub fn is_illegal(&self, label: usize) -> bool {
        self.illegal[label]
    }

    pub fn t_init(&self) -> usize {
        self.t_init
    }

    pub fn input_penalties(&self) -> &[(usize, CMatrix)] {
        &self.input_penalties
    }

    pub fn reach(&self) -> Option<usize> {
        self.reach
    }

    /// Labels of the valid computation, in order.
    pub fn valid_path(&self) -> &[usize] {
        &self.valid_path
    }

    /// Number of clock states on the valid path.
    pub fn steps(&self) -> usize {
        self.valid_path.len()
    }

    /// True when `T_init ≤ ⌈c·√T⌉`.
    pub fn satisfies_init_bound(&self, c: f64) -> bool {
        self.t_init as f64 <= (c * (self.steps() as f64).sqrt()).ceil()
    }

    /// Connected components of the undirected transition graph, tagged by
    /// the presence of illegal labels.
    pub fn invariant_partition(&self) -> Vec<Subspace> {
        let n = self.labels.len();
        let mut uf = UnionFind::new(n);
        for &(a, b) in &self.rules {
            uf.union(a, b);
        }
        uf.groups()
            .into_iter()
            .map(|members| self.describe(&members))
            .collect()
    }

    fn describe(&self, members: &[usize]) -> Subspace {
        let start = members.iter().copied().find(|&m| self.prev[m].is_none());
        let cycle = start.is_none();
        let first = start.unwrap_or(members[0]);
        let mut labels = vec![first];
        let mut cur = first;
        while let Some(nx) = self.next[cur] {
            if nx == first {
                break;
            }
            labels.push(nx);
            cur = nx;
        }
        let n_ill = labels.iter().filter(|&&l| self.illegal[l]).count();
        let kind = if n_ill == 0 {
            SubspaceKind::LegalOnly
        } else if n_ill == labels.len() {
            SubspaceKind::IllegalOnly
        } else {
            SubspaceKind::Mixed
        };
        let flags: Vec<bool> = labels.iter().map(|&l| self.illegal[l]).collect();
        let reach = (kind == SubspaceKind::Mixed).then(|| component_reach(&flags, cycle));
        Subspace {
            valid_path: labels[0] == 0,
            labels,
            kind,
            cycle,
            reach,
        }
    }
}

/// Largest distance from a legal position to the nearest illegal one.
fn component_reach(illegal: &[bool], cycle: bool) -> usize {
    let n = illegal.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&i| illegal[i]).collect();
    for &i in &queue {
        dist[i] = 0;
    }
    while let Some(i) = queue.pop_front() {
        let mut nbrs = Vec::with_capacity(2);
        if i > 0 {
            nbrs.push(i - 1);
        } else if cycle {
            nbrs.push(n - 1);
        }
        if i + 1 < n {
            nbrs.push(i + 1);
        } else if cycle {
            nbrs.push(0);
        }
        for j in nbrs {
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    dist.into_iter().max().unwrap_or(0)
}

/// Edges of a mixed component to drop so that every remaining piece holds
/// at least one illegal position and at most `2r + 1` positions.
///
/// Positions refer to the component's walk order; the returned pairs are
/// `(i, j)` with `j` the successor of `i` (for a cycle, `(n−1, 0)` is the
/// closing edge).
pub fn mixed_cuts(illegal: &[bool], cycle: bool) -> Vec<(usize, usize)> {
    let n = illegal.len();
    let ill: Vec<usize> = (0..n).filter(|&i| illegal[i]).collect();
    assert!(!ill.is_empty(), "mixed component without illegal label");
    let mut cuts = Vec::new();
    let mut cut_after = |p: usize| {
        let a = p % n;
        cuts.push((a, (a + 1) % n));
    };
    for w in ill.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = b - a - 1;
        cut_after(a + m.div_ceil(2));
    }
    if cycle {
        let a = *ill.last().unwrap();
        let b = ill[0] + n;
        let m = b - a - 1;
        cut_after(a + m.div_ceil(2));
    }
    cuts.sort_unstable();
    cuts.dedup();
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn partition_example() {
        let k =
            ClockSpec::new(names(&["a", "b", "c"]), vec![(0, 1)], &[2], 0, vec![], None).unwrap();
        let p = k.invariant_partition();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].labels, vec![0, 1]);
        assert_eq!(p[0].kind, SubspaceKind::LegalOnly);
        assert!(p[0].valid_path);
        assert_eq!(p[1].labels, vec![2]);
        assert_eq!(p[1].kind, SubspaceKind::IllegalOnly);
    }

    #[test]
    fn branch_into_illegal_is_mixed() {
        let k = ClockSpec::dynamic_init(
            9,
            &[MixedBranch {
                len: 4,
                illegal: vec![3],
                cycle: false,
            }],
        )
        .unwrap();
        assert_eq!(k.t_init(), 3);
        let p = k.invariant_partition();
        assert_eq!(p[1].kind, SubspaceKind::Mixed);
        assert_eq!(p[1].reach, Some(3));
    }

    #[test]
    fn rejects_nondeterminism_and_legal_loops() {
        assert!(ClockSpec::new(
            names(&["a", "b", "c"]),
            vec![(0, 1), (0, 2)],
            &[],
            0,
            vec![],
            None
        )
        .is_err());
        // A legal-only cycle besides the valid path.
        assert!(ClockSpec::new(
            names(&["a", "b", "c", "d", "e"]),
            vec![(0, 1), (2, 3), (3, 4), (4, 2)],
            &[],
            0,
            vec![],
            None
        )
        .is_err());
        // The same cycle with an illegal label is fine.
        let k = ClockSpec::new(
            names(&["a", "b", "c", "d", "e"]),
            vec![(0, 1), (2, 3), (3, 4), (4, 2)],
            &[3],
            0,
            vec![],
            None,
        )
        .unwrap();
        let p = k.invariant_partition();
        assert!(p[1].cycle);
        assert_eq!(p[1].reach, Some(1));
    }

    #[test]
    fn reach_limit_is_enforced() {
        let e = ClockSpec::new(
            names(&["a", "b", "c", "d", "e"]),
            vec![(0, 1), (2, 3), (3, 4)],
            &[2],
            0,
            vec![],
            Some(1),
        );
        assert!(matches!(e, Err(Error::InvalidClock(_))));
    }

    #[test]
    fn cuts_bound_segment_length() {
        let ill = [false, false, true, false, false, false, false, true, false];
        let cuts = mixed_cuts(&ill, false);
        assert_eq!(cuts, vec![(4, 5)]);
        let ill = [true, false, false, false, false];
        assert_eq!(mixed_cuts(&ill, true), vec![(2, 3)]);
        let ill = [true, true, false];
        assert_eq!(mixed_cuts(&ill, false), vec![(0, 1)]);
    }
}
