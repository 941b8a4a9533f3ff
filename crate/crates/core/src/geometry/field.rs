use super::TorusGrid;
use crate::linalg::frob;
use crate::{CMat, Error, Result, C64};
use rayon::prelude::*;
use std::fmt;

/// Which differential form a field's coefficient belongs to. Coefficients
/// are stored relative to dz, dz̄ or dz∧dz̄.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormType {
    Function,
    OneZero,
    ZeroOne,
    OneOne,
}

impl fmt::Display for FormType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormType::Function => "function",
            FormType::OneZero => "(1,0)-form",
            FormType::ZeroOne => "(0,1)-form",
            FormType::OneOne => "(1,1)-form",
        };
        f.write_str(s)
    }
}

/// A complex-matrix-valued field sampled on the n×n periodic grid.
///
/// `values[iy * n + ix]` is the `rows × cols` matrix at (ix/n, iy/n).
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub form: FormType,
    pub values: Vec<CMat>,
}

impl Field {
    pub fn zeros(grid: &TorusGrid, rows: usize, cols: usize, form: FormType) -> Field {
        Field { n: grid.n(), rows, cols, form, values: vec![CMat::zeros(rows, cols); grid.len()] }
    }

    pub fn constant(grid: &TorusGrid, m: &CMat, form: FormType) -> Field {
        Field { n: grid.n(), rows: m.nrows(), cols: m.ncols(), form, values: vec![m.clone(); grid.len()] }
    }

    /// Sample `f(x, y)` at every grid point.
    pub fn from_fn<F>(grid: &TorusGrid, rows: usize, cols: usize, form: FormType, f: F) -> Field
    where
        F: Fn(f64, f64) -> CMat,
    {
        let values: Vec<CMat> = grid.points().map(|(x, y)| f(x, y)).collect();
        debug_assert!(values.iter().all(|m| m.shape() == (rows, cols)));
        Field { n: grid.n(), rows, cols, form, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn require_form(&self, form: FormType) -> Result<()> {
        if self.form == form {
            Ok(())
        } else {
            Err(Error::FormType { expected: form.to_string(), got: self.form.to_string() })
        }
    }

    pub fn require_shape(&self, rows: usize, cols: usize, what: &str) -> Result<()> {
        if self.shape() == (rows, cols) {
            Ok(())
        } else {
            Err(Error::Shape(format!("{what}: expected {rows}x{cols}, got {}x{}", self.rows, self.cols)))
        }
    }

    pub fn with_form(mut self, form: FormType) -> Field {
        self.form = form;
        self
    }

    /// Pointwise map to a new field with the given form type.
    pub fn map<F>(&self, form: FormType, f: F) -> Field
    where
        F: Fn(&CMat) -> CMat + Sync + Send,
    {
        let values: Vec<CMat> = self.values.par_iter().map(f).collect();
        let (rows, cols) = values.first().map(|m| m.shape()).unwrap_or((self.rows, self.cols));
        Field { n: self.n, rows, cols, form, values }
    }

    /// Pointwise map over two fields of the same grid.
    pub fn zip<F>(&self, other: &Field, form: FormType, f: F) -> Field
    where
        F: Fn(&CMat, &CMat) -> CMat + Sync + Send,
    {
        assert_eq!(self.n, other.n, "fields live on different grids");
        let values: Vec<CMat> = self.values.par_iter().zip(other.values.par_iter()).map(|(a, b)| f(a, b)).collect();
        let (rows, cols) = values.first().map(|m| m.shape()).unwrap_or((self.rows, self.cols));
        Field { n: self.n, rows, cols, form, values }
    }

    /// Fallible pointwise map (e.g. matrix inverse, square root).
    pub fn try_map<F>(&self, form: FormType, f: F) -> Result<Field>
    where
        F: Fn(&CMat) -> Result<CMat> + Sync + Send,
    {
        let values: Result<Vec<CMat>> = self.values.par_iter().map(f).collect();
        let values = values?;
        let (rows, cols) = values.first().map(|m| m.shape()).unwrap_or((self.rows, self.cols));
        Ok(Field { n: self.n, rows, cols, form, values })
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip(other, self.form, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip(other, self.form, |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> Field {
        self.map(self.form, move |a| a * c)
    }

    /// Pointwise matrix product `self · other`.
    pub fn mul(&self, other: &Field, form: FormType) -> Field {
        self.zip(other, form, |a, b| a * b)
    }

    /// Pointwise conjugate transpose (form type left to the caller).
    pub fn adjoint(&self, form: FormType) -> Field {
        self.map(form, |a| a.adjoint())
    }

    /// Largest pointwise Frobenius norm.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(frob).fold(0.0, f64::max)
    }

    /// Largest modulus of a single matrix entry over the grid.
    pub fn sup_entry(&self, r: usize, c: usize) -> f64 {
        self.values.iter().map(|m| m[(r, c)].norm()).fold(0.0, f64::max)
    }

    /// Pointwise trace as a 1×1 field.
    pub fn trace(&self) -> Field {
        self.map(self.form, |a| CMat::from_element(1, 1, a.trace()))
    }

    /// Scalar entry of a 1×1 field at grid index.
    pub fn scalar_at(&self, idx: usize) -> C64 {
        self.values[idx][(0, 0)]
    }
}

/// A real 1-form with matrix coefficients, a_x dx + a_y dy. Both
/// coefficient fields are labelled as functions.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub x: Field,
    pub y: Field,
}

impl OneForm {
    pub fn zeros(grid: &TorusGrid, r: usize) -> OneForm {
        OneForm { x: Field::zeros(grid, r, r, FormType::Function), y: Field::zeros(grid, r, r, FormType::Function) }
    }

    pub fn rank(&self) -> usize {
        self.x.rows
    }

    pub fn add(&self, o: &OneForm) -> OneForm {
        OneForm { x: self.x.add(&o.x), y: self.y.add(&o.y) }
    }

    pub fn sub(&self, o: &OneForm) -> OneForm {
        OneForm { x: self.x.sub(&o.x), y: self.y.sub(&o.y) }
    }

    pub fn scale(&self, c: C64) -> OneForm {
        OneForm { x: self.x.scale(c), y: self.y.scale(c) }
    }

    /// Hodge star on the flat torus: *(a_x dx + a_y dy) = −a_y dx + a_x dy.
    pub fn hodge(&self) -> OneForm {
        OneForm { x: self.y.scale(C64::new(-1.0, 0.0)), y: self.x.clone() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.x.sup_norm().max(self.y.sup_norm())
    }

    /// Largest |M + M†| over both coefficients.
    pub fn skew_defect(&self) -> f64 {
        [&self.x, &self.y].iter().flat_map(|f| f.values.iter()).map(|m| frob(&(m + m.adjoint()))).fold(0.0, f64::max)
    }
}
