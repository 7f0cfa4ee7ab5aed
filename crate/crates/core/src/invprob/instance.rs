use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::InvProbError;
use crate::number::Rational;

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Rational>>", into = "Vec<Vec<Rational>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, InvProbError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(InvProbError::Shape("matrix must be non-empty".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(InvProbError::Shape(format!("row {i} has {} entries, expected {cols}", rows[i].len())));
        }
        let n_rows = rows.len();
        Ok(Matrix { rows: n_rows, cols, data: rows.into_iter().flatten().collect() })
    }

    /// Small-literal constructor for tests and demos.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rational::from_int(v)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ r`.
    pub fn tr_mul_vec(&self, r: &[Rational]) -> Vec<Rational> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j) * &r[i]).sum()).collect()
    }

    /// `A_jᵀ r` for a single column.
    pub fn col_dot(&self, j: usize, r: &[Rational]) -> Rational {
        (0..self.rows).map(|i| self.get(i, j) * &r[i]).sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl TryFrom<Vec<Vec<Rational>>> for Matrix {
    type Error = InvProbError;

    fn try_from(rows: Vec<Vec<Rational>>) -> Result<Self, Self::Error> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<Rational>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(v: &[Rational]) -> Rational {
    v.iter().map(Rational::square).sum()
}

pub fn norm1(v: &[Rational]) -> Rational {
    v.iter().map(Rational::abs).sum()
}

/// `Ax − y`.
pub fn residual(a: &Matrix, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    a.mul_vec(x).into_iter().zip(y).map(|(ax, yi)| ax - yi).collect()
}

/// Regularization parameter of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    /// Constraint radius of basis pursuit.
    Epsilon(Rational),
    /// Penalty weight of lasso².
    Lambda(Rational),
}

impl Param {
    pub fn value(&self) -> &Rational {
        match self {
            Param::Epsilon(v) | Param::Lambda(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    pub a: Matrix,
    pub y: Vec<Rational>,
    pub param: Param,
    /// Noise used when `y` was generated as `Ax₀ + e`.
    pub noise: Option<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRepr {
    #[serde(rename = "A")]
    a: Matrix,
    y: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<Vec<Rational>>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = InvProbError;

    fn try_from(r: InstanceRepr) -> Result<Self, Self::Error> {
        let param = match (r.epsilon, r.lambda) {
            (Some(e), None) => Param::Epsilon(e),
            (None, Some(l)) => Param::Lambda(l),
            (None, None) => return Err(InvProbError::InvalidParameter("missing field `epsilon` or `lambda`".into())),
            (Some(_), Some(_)) => {
                return Err(InvProbError::InvalidParameter("fields `epsilon` and `lambda` are exclusive".into()))
            }
        };
        let mut inst = Instance::new(r.a, r.y, param)?;
        if let Some(e) = r.noise {
            if e.len() != inst.y.len() {
                return Err(InvProbError::Shape(format!("field `noise` has {} entries, expected {}", e.len(), inst.y.len())));
            }
            inst.noise = Some(e);
        }
        Ok(inst)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(i: Instance) -> Self {
        let (epsilon, lambda) = match i.param {
            Param::Epsilon(e) => (Some(e), None),
            Param::Lambda(l) => (None, Some(l)),
        };
        InstanceRepr { a: i.a, y: i.y, epsilon, lambda, noise: i.noise }
    }
}

/// Checks `m < N`, `N ≥ 2` and `|y| = m`.
pub fn check_shape(a: &Matrix, y: &[Rational]) -> Result<(), InvProbError> {
    let (m, n) = (a.rows(), a.cols());
    if n < 2 {
        return Err(InvProbError::Shape(format!("field `A` needs at least 2 columns, got {n}")));
    }
    if m >= n {
        return Err(InvProbError::Shape(format!("field `A` must have fewer rows than columns, got {m}×{n}")));
    }
    if y.len() != m {
        return Err(InvProbError::Shape(format!("field `y` has {} entries, expected {m}", y.len())));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, v: &Rational) -> Result<(), InvProbError> {
    if v.signum() <= 0 {
        return Err(InvProbError::InvalidParameter(format!("field `{name}` must be positive, got {v}")));
    }
    Ok(())
}

impl Instance {
    pub fn new(a: Matrix, y: Vec<Rational>, param: Param) -> Result<Self, InvProbError> {
        check_shape(&a, &y)?;
        match &param {
            Param::Epsilon(e) => check_positive("epsilon", e)?,
            Param::Lambda(l) => check_positive("lambda", l)?,
        }
        Ok(Instance { a, y, param, noise: None })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Parses the instance format; type errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self, InvProbError> {
        let parse = |msg: String| InvProbError::Parse(msg);
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse(e.to_string()))?;
        let obj = value.as_object().ok_or_else(|| parse("instance must be a JSON object".into()))?;
        for (key, v) in obj {
            let checked = match key.as_str() {
                "A" => serde_json::from_value::<Matrix>(v.clone()).map(drop),
                "y" | "noise" => serde_json::from_value::<Vec<Rational>>(v.clone()).map(drop),
                "epsilon" | "lambda" => serde_json::from_value::<Rational>(v.clone()).map(drop),
                other => return Err(parse(format!("unknown field `{other}`"))),
            };
            checked.map_err(|e| parse(format!("field `{key}`: {e}")))?;
        }
        serde_json::from_value(value).map_err(|e| parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Data vector read by effective solver wrappers: `A` row-major, then `y`.
    pub fn data_vector(&self) -> Vec<Rational> {
        self.a.entries().iter().chain(&self.y).cloned().collect()
    }
}

/// Uniform rational in `[-bound, bound]` with denominator at most `max_den`.
pub fn random_rational(rng: &mut impl Rng, bound: i64, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    let p = rng.gen_range(-bound * q..=bound * q);
    Rational::frac(p, q)
}

/// Random `m×N` instance: entries of `A` in `[−2, 2]` with denominators
/// ≤ 16, a sparse `x₀` and small noise, `y = Ax₀ + e`.
pub fn random_instance(rng: &mut impl Rng, m: usize, n: usize, param: Param) -> Result<Instance, InvProbError> {
    let a = Matrix::from_rows((0..m).map(|_| (0..n).map(|_| random_rational(rng, 2, 16)).collect()).collect())?;
    let support = (n / 3).max(1);
    let mut x0 = vec![Rational::zero(); n];
    for _ in 0..support {
        let j = rng.gen_range(0..n);
        x0[j] = random_rational(rng, 1, 8);
    }
    let e: Vec<Rational> = (0..m).map(|_| random_rational(rng, 1, 64) * Rational::frac(1, 8)).collect();
    let y = a.mul_vec(&x0).into_iter().zip(&e).map(|(v, ei)| v + ei).collect();
    let mut inst = Instance::new(a, y, param)?;
    inst.noise = Some(e);
    Ok(inst)
}
