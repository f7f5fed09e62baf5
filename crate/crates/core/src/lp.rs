//! Dense two-phase tableau simplex over exact rationals.
//!
//! Small on purpose: the configuration programs have a handful of rows and
//! at most a few thousand columns. Bland's rule is used for both the
//! entering and the leaving variable, so the method terminates on
//! degenerate programs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    /// Sparse `(column, coefficient)` pairs.
    pub terms: Vec<(usize, BigRational)>,
    pub sense: Sense,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal {
        x: Vec<BigRational>,
        objective: BigRational,
    },
    Infeasible,
    Unbounded,
}

pub(crate) fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    /// Reduced costs `c_j − c_B·B⁻¹A_j`; we maximize.
    reduced: Vec<BigRational>,
    objective: BigRational,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[k] -= &factor * &pivot_rhs;
        }
        let factor = self.reduced[col].clone();
        if !factor.is_zero() {
            for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.objective += &factor * &pivot_rhs;
        }
        self.basis[r] = col;
    }

    /// Runs simplex iterations over columns `< allowed`. Returns `false`
    /// when the objective is unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.reduced[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &row[col];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }
}

/// Maximizes `objective·x` subject to `constraints` and `x ≥ 0`.
pub(crate) fn maximize(objective: &[BigRational], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    // Normalize to non-negative right-hand sides.
    let normalized: Vec<Constraint> = constraints
        .iter()
        .map(|c| {
            if c.rhs.is_negative() {
                let sense = match c.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                let terms = c.terms.iter().map(|(j, a)| (*j, -a)).collect();
                Constraint {
                    terms,
                    sense,
                    rhs: -&c.rhs,
                }
            } else {
                c.clone()
            }
        })
        .collect();

    let slack_count = normalized.iter().filter(|c| c.sense != Sense::Eq).count();
    let artificial_count = normalized.iter().filter(|c| c.sense != Sense::Le).count();
    let first_artificial = n + slack_count;
    let width = first_artificial + artificial_count;

    let mut rows = Vec::with_capacity(normalized.len());
    let mut rhs = Vec::with_capacity(normalized.len());
    let mut basis = Vec::with_capacity(normalized.len());
    let (mut slack, mut art) = (n, first_artificial);
    for Constraint {
        terms,
        sense,
        rhs: b,
    } in normalized
    {
        let mut row = vec![BigRational::zero(); width];
        for (j, a) in terms {
            row[j] += a;
        }
        match sense {
            Sense::Le => {
                row[slack] = BigRational::one();
                basis.push(slack);
                slack += 1;
            }
            Sense::Ge => {
                row[slack] = -BigRational::one();
                slack += 1;
                row[art] = BigRational::one();
                basis.push(art);
                art += 1;
            }
            Sense::Eq => {
                row[art] = BigRational::one();
                basis.push(art);
                art += 1;
            }
        }
        rows.push(row);
        rhs.push(b);
    }

    // Phase 1: maximize −Σ artificials.
    let mut reduced = vec![BigRational::zero(); width];
    let mut phase1_objective = BigRational::zero();
    for (r, &b) in basis.iter().enumerate() {
        if b >= first_artificial {
            for (v, a) in reduced.iter_mut().zip(&rows[r]) {
                *v += a;
            }
            phase1_objective -= &rhs[r];
        }
    }
    for v in reduced.iter_mut().skip(first_artificial) {
        *v = BigRational::zero();
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        reduced,
        objective: phase1_objective,
    };
    if artificial_count > 0 {
        t.optimize(width);
        if !t.objective.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= first_artificial {
                match (0..first_artificial).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(col) => t.pivot(r, col),
                    None => {
                        // Redundant row.
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    // Phase 2.
    let mut reduced = vec![BigRational::zero(); width];
    reduced[..n].clone_from_slice(objective);
    let mut value = BigRational::zero();
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n && !objective[b].is_zero() {
            let cb = &objective[b];
            for (v, a) in reduced.iter_mut().zip(&t.rows[r]) {
                if !a.is_zero() {
                    *v -= cb * a;
                }
            }
            value += cb * &t.rhs[r];
        }
    }
    t.reduced = reduced;
    t.objective = value;
    if !t.optimize(first_artificial) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[r].clone();
        }
    }
    LpOutcome::Optimal {
        x,
        objective: t.objective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn row(terms: &[(usize, i64)], sense: Sense, rhs: i64) -> Constraint {
        Constraint {
            terms: terms.iter().map(|&(j, a)| (j, q(a, 1))).collect(),
            sense,
            rhs: q(rhs, 1),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let out = maximize(
            &[q(3, 1), q(5, 1)],
            &[
                row(&[(0, 1)], Sense::Le, 4),
                row(&[(1, 2)], Sense::Le, 12),
                row(&[(0, 3), (1, 2)], Sense::Le, 18),
            ],
        );
        assert_eq!(
            out,
            LpOutcome::Optimal {
                x: vec![q(2, 1), q(6, 1)],
                objective: q(36, 1)
            }
        );
    }

    #[test]
    fn fractional_vertex_with_equality() {
        // max x + y, 2x + y ≤ 3, x + 3y ≤ 4, x + y + z = 2 → x = 1, y = 1
        let out = maximize(
            &[q(1, 1), q(1, 1), q(0, 1)],
            &[
                row(&[(0, 2), (1, 1)], Sense::Le, 3),
                row(&[(0, 1), (1, 3)], Sense::Le, 4),
                row(&[(0, 1), (1, 1), (2, 1)], Sense::Eq, 2),
            ],
        );
        let LpOutcome::Optimal { objective, .. } = out else {
            panic!()
        };
        assert_eq!(objective, q(2, 1));

        // max x, 3x ≤ 2 → 2/3
        let out = maximize(&[q(1, 1)], &[row(&[(0, 3)], Sense::Le, 2)]);
        let LpOutcome::Optimal { x, .. } = out else {
            panic!()
        };
        assert_eq!(x, vec![q(2, 3)]);
    }

    #[test]
    fn lower_bounds_and_infeasibility() {
        let out = maximize(
            &[q(-1, 1)],
            &[row(&[(0, 1)], Sense::Ge, 2), row(&[(0, 1)], Sense::Le, 5)],
        );
        assert_eq!(
            out,
            LpOutcome::Optimal {
                x: vec![q(2, 1)],
                objective: q(-2, 1)
            }
        );
        let out = maximize(
            &[q(1, 1)],
            &[row(&[(0, 1)], Sense::Ge, 3), row(&[(0, 1)], Sense::Le, 2)],
        );
        assert_eq!(out, LpOutcome::Infeasible);
        assert_eq!(maximize(&[q(1, 1)], &[]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let out = maximize(
            &[q(1, 1), q(2, 1)],
            &[
                row(&[(0, 1), (1, 1)], Sense::Eq, 3),
                row(&[(0, 2), (1, 2)], Sense::Eq, 6),
                row(&[(1, 1)], Sense::Le, 1),
            ],
        );
        let LpOutcome::Optimal { x, objective } = out else {
            panic!()
        };
        assert_eq!(x, vec![q(2, 1), q(1, 1)]);
        assert_eq!(objective, q(4, 1));
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // -x ≤ -1 means x ≥ 1
        let out = maximize(&[q(-1, 1)], &[row(&[(0, -1)], Sense::Le, -1)]);
        let LpOutcome::Optimal { x, .. } = out else {
            panic!()
        };
        assert_eq!(x, vec![q(1, 1)]);
    }
}
