//! Small fixed-size vector and matrix helpers used for pointwise algebra.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const ZERO3: Vec3 = [0.0; 3];
pub const ZERO33: Mat3 = [[0.0; 3]; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm2(a: &Vec3) -> f64 {
    dot(a, a)
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// `A · x`, i.e. `(A x)_i = A_ij x_j`.
#[inline]
pub fn matvec(m: &Mat3, x: &Vec3) -> Vec3 {
    [dot(&m[0], x), dot(&m[1], x), dot(&m[2], x)]
}

/// `x · A · y`.
#[inline]
pub fn quad(m: &Mat3, x: &Vec3, y: &Vec3) -> f64 {
    dot(x, &matvec(m, y))
}

/// `A : B = Σ A_ij B_ij`.
#[inline]
pub fn contract(a: &Mat3, b: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a[i][j] * b[i][j];
        }
    }
    s
}

/// Outer product `(a b)_ij = a_i b_j`.
#[inline]
pub fn outer(a: &Vec3, b: &Vec3) -> Mat3 {
    let mut m = ZERO33;
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[i] * b[j];
        }
    }
    m
}

#[inline]
pub fn transpose(m: &Mat3) -> Mat3 {
    let mut t = ZERO33;
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

/// Tangential part of `a` with respect to `n`: `n × (a × n) = |n|² a − (a·n) n`.
#[inline]
pub fn perp(a: &Vec3, n: &Vec3) -> Vec3 {
    cross(n, &cross(a, n))
}

/// Levi-Civita symbol.
#[inline]
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_product_expansion() {
        let a = [0.3, -1.2, 0.7];
        let n = [0.6, 0.0, 0.8];
        let p = perp(&a, &n);
        let direct = sub(&scale(&a, norm2(&n)), &scale(&n, dot(&a, &n)));
        for i in 0..3 {
            assert!((p[i] - direct[i]).abs() < 1e-15);
        }
        assert!(dot(&p, &n).abs() < 1e-15);
    }

    #[test]
    fn levi_civita_matches_cross() {
        let a = [1.0, 2.0, 3.0];
        let b = [-0.5, 0.25, 4.0];
        let c = cross(&a, &b);
        for i in 0..3 {
            let mut s = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    s += levi_civita(i, j, k) * a[j] * b[k];
                }
            }
            assert!((s - c[i]).abs() < 1e-14);
        }
    }
}
