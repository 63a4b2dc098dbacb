//! Small fixed-size tensors over spacetime indices `0 = t, 1..=3 = x`.

pub type Tensor2 = [[f64; 4]; 4];
pub type Tensor3 = [[[f64; 4]; 4]; 4];

/// The Minkowski metric `diag(−1, 1, 1, 1)`; numerically equal to its inverse.
pub const MINKOWSKI: Tensor2 = [
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

pub const ZERO2: Tensor2 = [[0.0; 4]; 4];
pub const ZERO3: Tensor3 = [[[0.0; 4]; 4]; 4];

pub fn symmetrize2(t: &Tensor2) -> Tensor2 {
    let mut out = ZERO2;
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = 0.5 * (t[a][b] + t[b][a]);
        }
    }
    out
}

/// Symmetrizes `t[i][a][b]` in the trailing pair `(a, b)`.
pub fn symmetrize3_tail(t: &Tensor3) -> Tensor3 {
    let mut out = ZERO3;
    for (o, s) in out.iter_mut().zip(t) {
        *o = symmetrize2(s);
    }
    out
}

pub fn scale2(t: &Tensor2, c: f64) -> Tensor2 {
    let mut out = *t;
    out.iter_mut().flatten().for_each(|v| *v *= c);
    out
}

pub fn add2(a: &Tensor2, b: &Tensor2) -> Tensor2 {
    let mut out = ZERO2;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

pub fn matmul(a: &Tensor2, b: &Tensor2) -> Tensor2 {
    let mut out = ZERO2;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn trace(a: &Tensor2) -> f64 {
    (0..4).map(|i| a[i][i]).sum()
}

/// `t_{ab} x^a y^b`.
pub fn contract2(t: &Tensor2, x: &[f64; 4], y: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            s += t[a][b] * x[a] * y[b];
        }
    }
    s
}

/// `m^{-1} t m^{-1}`, raising both indices of a covariant 2-tensor.
pub fn raise_both(t: &Tensor2) -> Tensor2 {
    matmul(&MINKOWSKI, &matmul(t, &MINKOWSKI))
}

/// Lowers a vector with the Minkowski metric.
pub fn lower(v: &[f64; 4]) -> [f64; 4] {
    [-v[0], v[1], v[2], v[3]]
}

pub fn from_flat2(values: &[f64]) -> Option<Tensor2> {
    if values.len() != 16 {
        return None;
    }
    let mut out = ZERO2;
    for (k, v) in values.iter().enumerate() {
        out[k / 4][k % 4] = *v;
    }
    Some(out)
}

pub fn from_flat3(values: &[f64]) -> Option<Tensor3> {
    if values.len() != 64 {
        return None;
    }
    let mut out = ZERO3;
    for (k, v) in values.iter().enumerate() {
        out[k / 16][(k / 4) % 4][k % 4] = *v;
    }
    Some(out)
}

pub fn flat2(t: &Tensor2) -> Vec<f64> {
    t.iter().flatten().copied().collect()
}

pub fn flat3(t: &Tensor3) -> Vec<f64> {
    t.iter().flatten().flatten().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip_is_row_major() {
        let v: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let t = from_flat3(&v).unwrap();
        assert_eq!(t[1][2][3], 27.0);
        assert_eq!(flat3(&t), v);
        assert!(from_flat2(&v).is_none());
    }

    #[test]
    fn raising_minkowski_gives_minkowski() {
        assert_eq!(raise_both(&MINKOWSKI), MINKOWSKI);
        assert_eq!(trace(&matmul(&MINKOWSKI, &MINKOWSKI)), 4.0);
    }
}
