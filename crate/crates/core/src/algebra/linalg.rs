//! Exact span membership by Gaussian elimination.
//!
//! Pivots are the first nonzero entry of each reduced row, in row order.

use std::sync::Arc;

use num_traits::Zero;

use super::{CyclotomicField, CyclotomicNumber, Field, Rational};
use crate::error::{Error, Result};

/// Incremental row echelon form that remembers how each reduced row
/// combines the original basis vectors.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    ctx: F::Ctx,
    len: usize,
    basis_count: usize,
    rows: Vec<(usize, Vec<F>, Vec<F>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ctx: F::Ctx, len: usize) -> Self {
        Echelon {
            ctx,
            len,
            basis_count: 0,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows. Returns the residue and the
    /// combination `c` (over the basis pushed so far) with `v = Σ c_i b_i + residue`.
    fn reduce(&self, v: &[F]) -> (Vec<F>, Vec<F>) {
        let mut v = v.to_vec();
        let mut combo = vec![F::zero_in(&self.ctx); self.basis_count];
        for (pivot, row, row_combo) in &self.rows {
            if v[*pivot].eq_zero() {
                continue;
            }
            let factor = v[*pivot].divide(&row[*pivot]).expect("pivot is nonzero");
            let neg = factor.negate();
            for j in *pivot..self.len {
                if !row[j].eq_zero() {
                    v[j].fma_assign(&neg, &row[j]);
                }
            }
            for (c, rc) in combo.iter_mut().zip(row_combo) {
                if !rc.eq_zero() {
                    c.fma_assign(&factor, rc);
                }
            }
        }
        (v, combo)
    }

    /// Adds a basis vector; returns whether it raised the rank.
    pub fn push(&mut self, v: &[F]) -> Result<bool> {
        if v.len() != self.len {
            return Err(Error::LengthMismatch(v.len(), self.len));
        }
        let (residue, combo) = self.reduce(v);
        let index = self.basis_count;
        self.basis_count += 1;
        for (_, _, rc) in self.rows.iter_mut() {
            rc.push(F::zero_in(&self.ctx));
        }
        match residue.iter().position(|c| !c.eq_zero()) {
            Some(pivot) => {
                // residue = v - Σ combo_i b_i
                let mut rc: Vec<F> = combo.iter().map(|c| c.negate()).collect();
                rc.push(F::one_in(&self.ctx));
                debug_assert_eq!(rc.len(), index + 1);
                self.rows.push((pivot, residue, rc));
                Ok(true)
            }
            None => Ok(false),
        }
    }

    /// Coefficients expressing `target` in the pushed basis, or `None` when it lies outside the span.
    pub fn solve(&self, target: &[F]) -> Result<Option<Vec<F>>> {
        if target.len() != self.len {
            return Err(Error::LengthMismatch(target.len(), self.len));
        }
        let (residue, combo) = self.reduce(target);
        if residue.iter().all(|c| c.eq_zero()) {
            Ok(Some(combo))
        } else {
            Ok(None)
        }
    }
}

/// Exact span membership over one field: coefficients `c` with `Σ c_i basis_i = target`.
pub fn in_span<F: Field>(ctx: &F::Ctx, target: &[F], basis: &[Vec<F>]) -> Result<Option<Vec<F>>> {
    let mut ech = Echelon::new(ctx.clone(), target.len());
    for b in basis {
        ech.push(b)?;
    }
    ech.solve(target)
}

/// Echelon form over `Q`, used to test cyclotomic targets against rational rows.
pub type RationalEchelon = Echelon<Rational>;

impl RationalEchelon {
    pub fn rational(len: usize) -> Self {
        Echelon::new((), len)
    }

    /// A cyclotomic target lies in the `Q(ζ)`-span of rational rows iff each of its
    /// power-basis coordinate vectors lies in their `Q`-span.
    pub fn solve_cyclotomic(
        &self,
        field: &Arc<CyclotomicField>,
        target: &[CyclotomicNumber],
    ) -> Result<Option<Vec<CyclotomicNumber>>> {
        if target.len() != self.len {
            return Err(Error::LengthMismatch(target.len(), self.len));
        }
        let deg = field.degree();
        let mut coeffs = vec![vec![<Rational as Zero>::zero(); deg]; self.basis_count];
        for k in 0..deg {
            let slice: Vec<Rational> = target.iter().map(|t| t.coord(k)).collect();
            match self.solve(&slice)? {
                Some(c) => {
                    for (i, ci) in c.into_iter().enumerate() {
                        coeffs[i][k] = ci;
                    }
                }
                None => return Ok(None),
            }
        }
        coeffs
            .iter()
            .map(|c| CyclotomicNumber::from_coords(field, c))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

/// Span membership of a cyclotomic target in the span of rational vectors.
pub fn in_span_rational_basis(
    field: &Arc<CyclotomicField>,
    target: &[CyclotomicNumber],
    basis: &[Vec<Rational>],
) -> Result<Option<Vec<CyclotomicNumber>>> {
    let mut ech = RationalEchelon::rational(target.len());
    for b in basis {
        ech.push(b)?;
    }
    ech.solve_cyclotomic(field, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn basis_vector_is_its_own_combination() {
        let basis = vec![v(&[1, 2, 3]), v(&[0, 1, 1])];
        let c = in_span(&(), &basis[0], &basis).unwrap().unwrap();
        assert_eq!(c, v(&[1, 0]));
    }

    #[test]
    fn zero_target() {
        let basis = vec![v(&[1, 2, 3]), v(&[0, 1, 1])];
        assert_eq!(in_span(&(), &v(&[0, 0, 0]), &basis).unwrap().unwrap(), v(&[0, 0]));
    }

    #[test]
    fn outside_span() {
        // e_4 is orthogonal to both rows.
        let basis = vec![v(&[1, 2, 3, 0]), v(&[3, -1, 0, 0])];
        assert!(in_span(&(), &v(&[1, 1, 1, 1]), &basis).unwrap().is_none());
        assert!(in_span(&(), &v(&[4, 1, 3, 0]), &basis).unwrap().is_some());
    }

    #[test]
    fn dependent_rows_are_fine() {
        let basis = vec![v(&[1, 1]), v(&[2, 2]), v(&[0, 1])];
        let t = v(&[3, 5]);
        let c = in_span(&(), &t, &basis).unwrap().unwrap();
        let recombined: Vec<Rational> = (0..2)
            .map(|j| (0..3).map(|i| &c[i] * &basis[i][j]).sum())
            .collect();
        assert_eq!(recombined, t);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let basis = vec![v(&[1, 1])];
        assert_eq!(in_span(&(), &v(&[1]), &basis), Err(Error::LengthMismatch(2, 1)));
    }

    #[test]
    fn cyclotomic_target_against_rational_rows() {
        let f = CyclotomicField::get(5);
        let z = CyclotomicNumber::zeta_power(&f, 1);
        let one = CyclotomicNumber::one_in(&f);
        let basis = vec![v(&[1, 0, 1]), v(&[0, 1, 1])];
        // z·b0 + 1·b1
        let target = vec![z.clone(), one.clone(), z.plus(&one)];
        let c = in_span_rational_basis(&f, &target, &basis).unwrap().unwrap();
        assert_eq!(c, vec![z.clone(), one.clone()]);
        let lifted: Vec<Vec<CyclotomicNumber>> = basis
            .iter()
            .map(|b| b.iter().map(|x| CyclotomicNumber::from_rational(&f, x)).collect())
            .collect();
        assert_eq!(in_span(&f, &target, &lifted).unwrap().unwrap(), c);
        let off = vec![z.clone(), one.clone(), z];
        assert!(in_span_rational_basis(&f, &off, &basis).unwrap().is_none());
    }
}
