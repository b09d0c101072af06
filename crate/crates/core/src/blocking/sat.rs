//! A small DPLL solver: two-watched-literal unit propagation, chronological
//! backtracking and activity-ordered branching.

use std::fmt::Write;

/// CNF over variables `1..=num_vars`; literals are signed variable ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{l} ");
            }
            s.push_str("0\n");
        }
        s
    }

    /// Whether `model` (indexed by variable id - 1) satisfies every clause.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

// Internal literal: 2 * var + negated.
fn lit(l: i32) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
}

fn value(assign: &[i8], l: usize) -> i8 {
    let a = assign[l >> 1];
    if l & 1 == 1 {
        -a
    } else {
        a
    }
}

struct Dpll {
    clauses: Vec<Vec<usize>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<i8>,
    trail: Vec<usize>,
    /// (trail length before the decision, decision literal, flipped).
    levels: Vec<(usize, usize, bool)>,
    qhead: usize,
    activity: Vec<f64>,
    bump: f64,
}

impl Dpll {
    fn enqueue(&mut self, l: usize) -> bool {
        match value(&self.assign, l) {
            1 => true,
            -1 => false,
            _ => {
                self.assign[l >> 1] = if l & 1 == 1 { -1 } else { 1 };
                self.trail.push(l);
                true
            }
        }
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let falsified = self.trail[self.qhead] ^ 1;
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let c = &mut self.clauses[ci];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                if value(&self.assign, c[0]) == 1 {
                    i += 1;
                    continue;
                }
                if let Some(k) = (2..c.len()).find(|&k| value(&self.assign, c[k]) != -1) {
                    c.swap(1, k);
                    let nw = c[1];
                    self.watches[nw].push(ci);
                    ws.swap_remove(i);
                    continue;
                }
                let first = c[0];
                if !self.enqueue(first) {
                    conflict = Some(ci);
                    break;
                }
                i += 1;
            }
            self.watches[falsified] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn undo(&mut self, len: usize) {
        for l in self.trail.drain(len..) {
            self.assign[l >> 1] = 0;
        }
        self.qhead = len;
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 0..self.assign.len() {
            if self.assign[v] == 0 && best.is_none_or(|b| self.activity[v] > self.activity[b]) {
                best = Some(v);
            }
        }
        best
    }
}

/// A satisfying assignment (indexed by variable id - 1), if any.
pub fn solve(cnf: &Cnf) -> Option<Vec<bool>> {
    let n = cnf.num_vars;
    let mut s = Dpll {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * n],
        assign: vec![0; n],
        trail: Vec::new(),
        levels: Vec::new(),
        qhead: 0,
        activity: vec![0.0; n],
        bump: 1.0,
    };
    let mut units = Vec::new();
    for c in &cnf.clauses {
        let mut c: Vec<usize> = c.iter().map(|&l| lit(l)).collect();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            continue;
        }
        match c.len() {
            0 => return None,
            1 => units.push(c[0]),
            _ => {
                let ci = s.clauses.len();
                s.watches[c[0]].push(ci);
                s.watches[c[1]].push(ci);
                for &l in &c {
                    s.activity[l >> 1] += 1e-3;
                }
                s.clauses.push(c);
            }
        }
    }
    for u in units {
        if !s.enqueue(u) {
            return None;
        }
    }
    if s.propagate().is_some() {
        return None;
    }
    loop {
        let Some(v) = s.pick() else {
            return Some(s.assign.iter().map(|&a| a == 1).collect());
        };
        s.levels.push((s.trail.len(), 2 * v, false));
        s.enqueue(2 * v);
        while let Some(ci) = s.propagate() {
            for k in 0..s.clauses[ci].len() {
                let var = s.clauses[ci][k] >> 1;
                s.activity[var] += s.bump;
            }
            s.bump *= 1.05;
            loop {
                let (len, l, flipped) = s.levels.pop()?;
                s.undo(len);
                if !flipped {
                    s.levels.push((len, l ^ 1, true));
                    s.enqueue(l ^ 1);
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(cnf: &Cnf) -> bool {
        (0..1u32 << cnf.num_vars).any(|m| {
            let model: Vec<bool> = (0..cnf.num_vars).map(|i| m >> i & 1 == 1).collect();
            cnf.satisfied_by(&model)
        })
    }

    #[test]
    fn basics() {
        let sat = Cnf { num_vars: 2, clauses: vec![vec![1, 2], vec![-1], vec![-2, 1, 2]] };
        let m = solve(&sat).unwrap();
        assert!(sat.satisfied_by(&m));
        let unsat = Cnf { num_vars: 1, clauses: vec![vec![1], vec![-1]] };
        assert!(solve(&unsat).is_none());
        assert!(solve(&Cnf { num_vars: 1, clauses: vec![vec![]] }).is_none());
        assert_eq!(Cnf { num_vars: 2, clauses: vec![vec![1, -2]] }.to_dimacs(), "p cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 4 pigeons, 3 holes; var (p, h) = 3p + h + 1.
        let mut clauses = Vec::new();
        for p in 0..4 {
            clauses.push((0..3).map(|h| 3 * p + h + 1).collect());
        }
        for h in 0..3 {
            for a in 0..4 {
                for b in a + 1..4 {
                    clauses.push(vec![-(3 * a + h + 1), -(3 * b + h + 1)]);
                }
            }
        }
        assert!(solve(&Cnf { num_vars: 12, clauses }).is_none());
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(
            clauses in proptest::collection::vec(
                proptest::collection::vec((1i32..=8, any::<bool>()).prop_map(|(v, n)| if n { -v } else { v }), 1..4),
                1..40,
            )
        ) {
            let cnf = Cnf { num_vars: 8, clauses };
            match solve(&cnf) {
                Some(m) => prop_assert!(cnf.satisfied_by(&m)),
                None => prop_assert!(!brute(&cnf)),
            }
        }
    }
}
