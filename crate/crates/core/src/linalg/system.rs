use nalgebra::DVector;

use crate::error::{Error, Result};

use super::matrix::C64;
use super::nullspace::{sparse_kernel, Cutoff, SparseRow};
use super::subspace::Field;

const DROP: f64 = 1e-15;

/// Homogeneous system `sum_k a_k z_k + b_k conj(z_k) = 0` in complex unknowns.
///
/// Over `Field::Complex` only linear terms are allowed and the kernel is a
/// complex subspace. Over `Field::Real` each equation is split into its real
/// and imaginary parts in the coordinates `(Re z, Im z)`, and the kernel is a
/// real subspace of `C^n`, orthonormal for `Re <v, w>`.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    unknowns: usize,
    field: Field,
    complex_rows: Vec<SparseRow<C64>>,
    real_rows: Vec<SparseRow<f64>>,
}

impl ConstraintSystem {
    pub fn new(unknowns: usize, field: Field) -> Self {
        Self {
            unknowns,
            field,
            complex_rows: Vec::new(),
            real_rows: Vec::new(),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn equations(&self) -> usize {
        match self.field {
            Field::Complex => self.complex_rows.len(),
            Field::Real => self.real_rows.len() / 2,
        }
    }

    /// Add one complex-linear equation.
    pub fn push(&mut self, linear: &[(usize, C64)]) {
        self.push_mixed(linear, &[]);
    }

    /// Add one equation with linear and conjugate-linear terms. Duplicate
    /// indices are summed.
    pub fn push_mixed(&mut self, linear: &[(usize, C64)], conjugate: &[(usize, C64)]) {
        match self.field {
            Field::Complex => {
                assert!(
                    conjugate.iter().all(|(_, c)| c.norm() <= DROP),
                    "conjugate-linear terms need a real-field system"
                );
                let row = merge(linear.iter().map(|(k, c)| (*k, *c)));
                if !row.is_empty() {
                    self.complex_rows.push(row);
                }
            }
            Field::Real => {
                let n = self.unknowns;
                let mut re = Vec::with_capacity(2 * (linear.len() + conjugate.len()));
                let mut im = Vec::with_capacity(re.capacity());
                for (k, a) in linear {
                    re.push((*k, a.re));
                    re.push((n + k, -a.im));
                    im.push((*k, a.im));
                    im.push((n + k, a.re));
                }
                for (k, b) in conjugate {
                    re.push((*k, b.re));
                    re.push((n + k, b.im));
                    im.push((*k, b.im));
                    im.push((n + k, -b.re));
                }
                let re = merge(re.into_iter());
                let im = merge(im.into_iter());
                // keep rows paired so equations() stays meaningful
                self.real_rows.push(re);
                self.real_rows.push(im);
            }
        }
    }

    /// Orthonormal kernel basis. `tol` is a relative singular-value cutoff
    /// (`0` selects the default).
    pub fn kernel(&self, tol: f64) -> Result<Vec<DVector<C64>>> {
        if tol < 0.0 {
            return Err(Error::Dimension(format!("negative tolerance {tol}")));
        }
        let cutoff = if tol > 0.0 {
            Cutoff::Relative(tol)
        } else {
            Cutoff::Default
        };
        match self.field {
            Field::Complex => Ok(sparse_kernel(self.unknowns, &self.complex_rows, cutoff)?.vectors),
            Field::Real => {
                let rows: Vec<_> = self.real_rows.iter().filter(|r| !r.is_empty()).cloned().collect();
                let n = self.unknowns;
                let k = sparse_kernel(2 * n, &rows, cutoff)?;
                Ok(k.vectors
                    .into_iter()
                    .map(|v| DVector::from_fn(n, |i, _| C64::new(v[i], v[n + i])))
                    .collect())
            }
        }
    }
}

fn merge<T>(terms: impl Iterator<Item = (usize, T)>) -> SparseRow<T>
where
    T: Copy + std::ops::AddAssign + Magnitude,
{
    let mut v: Vec<(usize, T)> = terms.collect();
    v.sort_by_key(|(k, _)| *k);
    let mut out: Vec<(usize, T)> = Vec::with_capacity(v.len());
    for (k, c) in v {
        match out.last_mut() {
            Some((j, acc)) if *j == k => *acc += c,
            _ => out.push((k, c)),
        }
    }
    out.retain(|(_, c)| c.magnitude() > DROP);
    out
}

trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for C64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}
