//! Dense complex matrices of dimension 2 and 4.
//!
//! Two-qubit operators use the index convention `2 * q1 + q2`, i.e. the first
//! tensor factor is the most significant bit.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity4() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for r1 in 0..2 {
        for c1 in 0..2 {
            for r2 in 0..2 {
                for c2 in 0..2 {
                    m[2 * r1 + r2][2 * c1 + c2] = a[r1][c1] * b[r2][c2];
                }
            }
        }
    }
    m
}

pub fn mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                m[i][j] += aik * b[k][j];
            }
        }
    }
    m
}

pub fn add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = *a;
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] += b[i][j];
        }
    }
    m
}

pub fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut m = *a;
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] -= b[i][j];
        }
    }
    m
}

pub fn scale(a: &Mat4, s: Complex64) -> Mat4 {
    let mut m = *a;
    m.iter_mut().flatten().for_each(|x| *x *= s);
    m
}

/// Entrywise complex conjugate (not the adjoint).
pub fn conj(a: &Mat4) -> Mat4 {
    let mut m = *a;
    m.iter_mut().flatten().for_each(|x| *x = x.conj());
    m
}

pub fn adjoint(a: &Mat4) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[j][i].conj();
        }
    }
    m
}

pub fn trace(a: &Mat4) -> Complex64 {
    (0..4).map(|i| a[i][i]).sum()
}

/// Largest entrywise modulus, used as the error norm throughout.
pub fn max_abs(a: &Mat4) -> f64 {
    a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    max_abs(&sub(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_places_first_factor_in_high_bit() {
        let x: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
        let id: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
        let xi = kron(&x, &id);
        // X on qubit 1 maps |00> (index 0) to |10> (index 2).
        assert_eq!(xi[2][0], ONE);
        assert_eq!(xi[1][0], ZERO);
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let mut a = identity4();
        a[0][3] = I;
        assert_eq!(mul(&a, &identity4()), a);
        assert_eq!(trace(&identity4()), Complex64::new(4.0, 0.0));
    }
}
