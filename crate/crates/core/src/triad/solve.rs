use serde::Serialize;

use super::{TriadError, TriadSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Count,
    FirstWitness,
    /// Stops at the first colouring found; `count` is then 1.
    ProveNone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringResult {
    pub count: u64,
    pub witness: Option<Vec<u8>>,
    pub nodes_explored: u64,
    /// The whole search space was covered.
    pub exhaustive: bool,
}

/// Index-level constraints: every triad has exactly one 1, no pair has two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    n: usize,
    triads: Vec<[usize; 3]>,
    pairs: Vec<[usize; 2]>,
    watch: Vec<Vec<Watch>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Watch {
    Triad(usize),
    Pair(usize),
}

impl ConstraintSet {
    /// Panics if any index is `>= n`.
    pub fn new(n: usize, triads: Vec<[usize; 3]>, pairs: Vec<[usize; 2]>) -> Self {
        let mut watch = vec![Vec::new(); n];
        for (k, t) in triads.iter().enumerate() {
            for &i in t {
                watch[i].push(Watch::Triad(k));
            }
        }
        for (k, p) in pairs.iter().enumerate() {
            for &i in p {
                watch[i].push(Watch::Pair(k));
            }
        }
        ConstraintSet { n, triads, pairs, watch }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn satisfied_by(&self, colouring: &[u8]) -> bool {
        colouring.len() == self.n
            && self
                .triads
                .iter()
                .all(|t| t.iter().map(|&i| colouring[i] as u32).sum::<u32>() == 1)
            && self.pairs.iter().all(|p| colouring[p[0]] + colouring[p[1]] <= 1)
    }
}

const UNSET: u8 = 2;

struct Search<'a> {
    cs: &'a ConstraintSet,
    mode: SolveMode,
    value: Vec<u8>,
    trail: Vec<usize>,
    count: u64,
    witness: Option<Vec<u8>>,
    nodes: u64,
    stop: bool,
}

impl Search<'_> {
    fn assign(&mut self, i: usize, v: u8, queue: &mut Vec<usize>) -> bool {
        match self.value[i] {
            UNSET => {
                self.value[i] = v;
                self.trail.push(i);
                queue.push(i);
                true
            }
            x => x == v,
        }
    }

    fn propagate(&mut self, start: usize) -> bool {
        let mut queue = vec![start];
        while let Some(i) = queue.pop() {
            for w in 0..self.cs.watch[i].len() {
                match self.cs.watch[i][w] {
                    Watch::Triad(k) => {
                        let t = self.cs.triads[k];
                        let vals = t.map(|j| self.value[j]);
                        let ones = vals.iter().filter(|&&v| v == 1).count();
                        let zeros = vals.iter().filter(|&&v| v == 0).count();
                        if ones > 1 || zeros == 3 {
                            return false;
                        }
                        if ones == 1 {
                            for (j, v) in t.iter().zip(vals) {
                                if v == UNSET && !self.assign(*j, 0, &mut queue) {
                                    return false;
                                }
                            }
                        } else if zeros == 2 {
                            let (j, _) = t.iter().zip(vals).find(|(_, v)| *v == UNSET).unwrap();
                            if !self.assign(*j, 1, &mut queue) {
                                return false;
                            }
                        }
                    }
                    Watch::Pair(k) => {
                        let [a, b] = self.cs.pairs[k];
                        let other = if a == i { b } else { a };
                        if self.value[i] == 1 && !self.assign(other, 0, &mut queue) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        for i in self.trail.drain(mark..) {
            self.value[i] = UNSET;
        }
    }

    fn run(&mut self, from: usize) {
        let Some(i) = (from..self.cs.n).find(|&i| self.value[i] == UNSET) else {
            self.count += 1;
            if self.witness.is_none() {
                self.witness = Some(self.value.clone());
            }
            if self.mode != SolveMode::Count {
                self.stop = true;
            }
            return;
        };
        for v in [1u8, 0] {
            self.nodes += 1;
            let mark = self.trail.len();
            self.value[i] = v;
            self.trail.push(i);
            if self.propagate(i) {
                self.run(i + 1);
            }
            self.undo_to(mark);
            if self.stop {
                return;
            }
        }
    }
}

pub fn solve_constraints(cs: &ConstraintSet, mode: SolveMode) -> ColoringResult {
    let mut s = Search {
        cs,
        mode,
        value: vec![UNSET; cs.n],
        trail: Vec::new(),
        count: 0,
        witness: None,
        nodes: 0,
        stop: false,
    };
    s.run(0);
    ColoringResult {
        count: s.count,
        witness: s.witness,
        nodes_explored: s.nodes,
        exhaustive: !s.stop,
    }
}

/// Searches the colourings of a validated system.
pub fn solve(system: &TriadSystem, mode: SolveMode) -> Result<ColoringResult, TriadError> {
    let report = system.validate();
    if let Some(o) = report.offences.first() {
        return Err(TriadError::InvalidSystem(format!(
            "{} {} rays {:?}: |dot| = {:e}",
            o.constraint, o.index, o.rays, o.dot
        )));
    }
    Ok(solve_constraints(&system.constraints(), mode))
}
