//! Brute-force reference computations used to cross-check the solvers.
//!
//! Everything here is exponential in the problem size and only meant for the
//! small instances exercised by tests and the acceptance suite.

use itertools::Itertools;

use crate::linalg::solve_square;
use crate::lp::{LinearProgram, Relation, Sense};
use crate::scalar::{dot, Scalar};

/// Answer of the vertex-enumeration oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum BruteForce<T> {
    Infeasible,
    Unbounded,
    Optimal(T),
}

/// Constraint `a^T x (rel) b` used by the enumeration.
struct Halfspace<T> {
    a: Vec<T>,
    rel: Relation,
    b: T,
}

fn halfspaces<T: Scalar>(lp: &LinearProgram<T>) -> Vec<Halfspace<T>> {
    let n = lp.num_vars();
    let unit = |j: usize| -> Vec<T> {
        (0..n).map(|k| if k == j { T::one() } else { T::zero() }).collect()
    };
    let mut hs: Vec<Halfspace<T>> = lp
        .rows
        .iter()
        .map(|r| Halfspace {
            a: r.coeffs.clone(),
            rel: r.relation,
            b: r.rhs.clone(),
        })
        .collect();
    for j in 0..n {
        if let Some(l) = &lp.lower[j] {
            hs.push(Halfspace { a: unit(j), rel: Relation::Ge, b: l.clone() });
        }
        if let Some(u) = &lp.upper[j] {
            hs.push(Halfspace { a: unit(j), rel: Relation::Le, b: u.clone() });
        }
    }
    hs
}

fn satisfies<T: Scalar>(hs: &[Halfspace<T>], x: &[T]) -> bool {
    hs.iter().all(|h| {
        let s = dot(&h.a, x) - h.b.clone();
        match h.rel {
            Relation::Le => !s.is_pos(),
            Relation::Ge => !s.is_neg(),
            Relation::Eq => s.is_zero_tol(),
        }
    })
}

fn vertices_of<T: Scalar>(hs: &[Halfspace<T>], n: usize, budget: usize) -> Option<Vec<Vec<T>>> {
    if n == 0 {
        return Some(vec![Vec::new()]);
    }
    let mut count = 0usize;
    let mut out: Vec<Vec<T>> = Vec::new();
    for combo in (0..hs.len()).combinations(n) {
        count += 1;
        if count > budget {
            return None;
        }
        let a: Vec<Vec<T>> = combo.iter().map(|&i| hs[i].a.clone()).collect();
        let b: Vec<T> = combo.iter().map(|&i| hs[i].b.clone()).collect();
        if let Some(x) = solve_square(&a, &b) {
            if satisfies(hs, &x) && !out.iter().any(|v| v == &x) {
                out.push(x);
            }
        }
    }
    Some(out)
}

/// Number of `n`-subsets the enumeration would visit.
pub fn enumeration_size(constraints: usize, n: usize) -> u128 {
    if n > constraints {
        return 0;
    }
    let k = n.min(constraints - n) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (constraints as u128 - i) / (i + 1);
    }
    c
}

/// Vertices of the feasible region of `lp`, or `None` over budget.
pub fn enumerate_vertices<T: Scalar>(lp: &LinearProgram<T>, budget: usize) -> Option<Vec<Vec<T>>> {
    vertices_of(&halfspaces(lp), lp.num_vars(), budget)
}

/// Solves `lp` by enumerating vertices and extreme rays.
///
/// Requires every variable to carry a lower bound, so the feasible region is
/// pointed and its recession cone is a pointed cone whose normalized slice is
/// a polytope. Returns `None` when that does not hold or the budget of
/// square solves is exceeded.
pub fn brute_force_lp<T: Scalar>(lp: &LinearProgram<T>, budget: usize) -> Option<BruteForce<T>> {
    let n = lp.num_vars();
    if lp.lower.iter().any(|l| l.is_none()) {
        return None;
    }
    let verts = enumerate_vertices(lp, budget)?;
    if verts.is_empty() {
        return Some(BruteForce::Infeasible);
    }

    // Recession cone sliced by sum(r) = 1.
    let mut cone: Vec<Halfspace<T>> = lp
        .rows
        .iter()
        .map(|r| Halfspace {
            a: r.coeffs.clone(),
            rel: r.relation,
            b: T::zero(),
        })
        .collect();
    for j in 0..n {
        let unit: Vec<T> = (0..n).map(|k| if k == j { T::one() } else { T::zero() }).collect();
        cone.push(Halfspace { a: unit.clone(), rel: Relation::Ge, b: T::zero() });
        if lp.upper[j].is_some() {
            cone.push(Halfspace { a: unit, rel: Relation::Le, b: T::zero() });
        }
    }
    cone.push(Halfspace {
        a: vec![T::one(); n],
        rel: Relation::Eq,
        b: T::one(),
    });
    let rays = vertices_of(&cone, n, budget)?;
    let improving = |v: &T| match lp.sense {
        Sense::Minimize => v.is_neg(),
        Sense::Maximize => v.is_pos(),
    };
    if rays.iter().any(|r| improving(&lp.objective_value(r))) {
        return Some(BruteForce::Unbounded);
    }
    let values = verts.iter().map(|v| lp.objective_value(v));
    let best = values
        .reduce(|a, b| match lp.sense {
            Sense::Minimize => T::min_of(a, b),
            Sense::Maximize => T::max_of(a, b),
        })
        .expect("non-empty");
    Some(BruteForce::Optimal(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn oracle_on_textbook_programs() {
        let lp = LinearProgram::maximize(vec![rat(3, 1), rat(2, 1)])
            .nonnegative()
            .row(vec![rat(1, 1), rat(1, 1)], Relation::Le, rat(4, 1))
            .row(vec![rat(1, 1), rat(3, 1)], Relation::Le, rat(6, 1));
        assert_eq!(brute_force_lp(&lp, 1000), Some(BruteForce::Optimal(rat(12, 1))));

        let lp = LinearProgram::maximize(vec![rat(1, 1)]).nonnegative();
        assert_eq!(brute_force_lp(&lp, 1000), Some(BruteForce::Unbounded));

        let lp = LinearProgram::minimize(vec![rat(1, 1)])
            .nonnegative()
            .row(vec![rat(1, 1)], Relation::Le, rat(-1, 1));
        assert_eq!(brute_force_lp(&lp, 1000), Some(BruteForce::Infeasible));
    }

    #[test]
    fn subset_count() {
        assert_eq!(enumeration_size(14, 6), 3003);
        assert_eq!(enumeration_size(3, 5), 0);
    }
}
