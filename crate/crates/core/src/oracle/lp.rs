use crate::error::{Error, Result};
use crate::model::Scalar;

/// `max_q min_i (A q)_i` over the probability simplex, for a nonnegative `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximinLp<T> {
    /// One row per constraint, one column per candidate.
    pub rows: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximinSolution<T> {
    pub value: T,
    /// Optimal mixture over columns.
    pub q: Vec<T>,
    /// Optimal mixture over rows; `max_x (wᵀA)_x ≤ value` certifies optimality.
    pub w: Vec<T>,
}

fn eps<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::from_ratio(1, 1_000_000_000)
    }
}

impl<T: Scalar> MaximinSolution<T> {
    /// Checks both `min_i (Aq)_i ≥ value` and `max_x (wᵀA)_x ≤ value`.
    pub fn is_certified(&self, lp: &MaximinLp<T>) -> bool {
        let e = eps::<T>();
        let cols = self.q.len();
        let primal = lp.rows.iter().all(|row| {
            let v = row.iter().zip(&self.q).fold(T::zero(), |a, (r, q)| a + r.clone() * q.clone());
            v + e.clone() >= self.value
        });
        let dual = (0..cols).all(|x| {
            let v = lp
                .rows
                .iter()
                .zip(&self.w)
                .fold(T::zero(), |a, (row, w)| a + row[x].clone() * w.clone());
            v <= self.value.clone() + e.clone()
        });
        primal && dual
    }
}

/// Solves the maximin game with a dense simplex under Bland's rule.
///
/// Works on `max Σz s.t. Aᵀz ≤ 1, z ≥ 0`, whose slack basis is feasible. The
/// optimum `V` is `1/Σz`, the row mixture is `z/Σz` and the column mixture is
/// read from the reduced costs of the slacks.
pub fn lp_maximin<T: Scalar>(lp: &MaximinLp<T>) -> Result<MaximinSolution<T>> {
    let r = lp.rows.len();
    let m = lp.rows.first().map_or(0, Vec::len);
    if r == 0 || m == 0 || lp.rows.iter().any(|row| row.len() != m) {
        return Err(Error::Precondition("maximin LP needs a nonempty rectangular matrix".into()));
    }
    if lp.rows.iter().flatten().any(|v| v.is_negative()) {
        return Err(Error::Precondition("maximin LP entries must be nonnegative".into()));
    }
    let e = eps::<T>();
    if let Some(i) = lp.rows.iter().position(|row| row.iter().all(|v| *v <= e)) {
        // a row that no mixture can lift caps the value at zero
        let mut w = vec![T::zero(); r];
        w[i] = T::one();
        let mut q = vec![T::zero(); m];
        q[0] = T::one();
        return Ok(MaximinSolution { value: T::zero(), q, w });
    }

    // tableau: m constraint rows over r structural + m slack columns, then rhs
    let width = r + m + 1;
    let mut tab: Vec<Vec<T>> = (0..m)
        .map(|x| {
            let mut row = vec![T::zero(); width];
            for i in 0..r {
                row[i] = lp.rows[i][x].clone();
            }
            row[r + x] = T::one();
            row[width - 1] = T::one();
            row
        })
        .collect();
    // reduced costs c_j - c_B B⁻¹ a_j and current objective
    let mut obj: Vec<T> = (0..width).map(|j| if j < r { T::one() } else { T::zero() }).collect();
    let mut basis: Vec<usize> = (r..r + m).collect();

    loop {
        let Some(enter) = (0..r + m).find(|&j| obj[j] > e) else {
            break;
        };
        let mut leave: Option<(usize, T)> = None;
        for k in 0..m {
            if tab[k][enter] > e {
                let ratio = tab[k][width - 1].clone() / tab[k][enter].clone();
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && basis[k] < basis[*l])
                    }
                };
                if better {
                    leave = Some((k, ratio));
                }
            }
        }
        let (pivot_row, _) = leave.ok_or_else(|| {
            Error::Precondition("maximin LP unbounded; a row has no positive entry".into())
        })?;
        let piv = tab[pivot_row][enter].clone();
        for v in tab[pivot_row].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let prow = tab[pivot_row].clone();
        for (k, row) in tab.iter_mut().enumerate() {
            if k == pivot_row {
                continue;
            }
            let f = row[enter].clone();
            if f.is_zero() {
                continue;
            }
            for (v, p) in row.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
        let f = obj[enter].clone();
        for (v, p) in obj.iter_mut().zip(&prow) {
            *v = v.clone() - f.clone() * p.clone();
        }
        basis[pivot_row] = enter;
    }

    let mut z = vec![T::zero(); r];
    for (k, &b) in basis.iter().enumerate() {
        if b < r {
            z[b] = tab[k][width - 1].clone();
        }
    }
    let total = z.iter().cloned().fold(T::zero(), |a, b| a + b);
    let value = T::one() / total.clone();
    let w: Vec<T> = z.into_iter().map(|v| v / total.clone()).collect();
    let y: Vec<T> = (0..m).map(|x| T::zero() - obj[r + x].clone()).collect();
    let ysum = y.iter().cloned().fold(T::zero(), |a, b| a + b);
    let q: Vec<T> = y.into_iter().map(|v| v / ysum.clone()).collect();
    Ok(MaximinSolution { value, q, w })
}
