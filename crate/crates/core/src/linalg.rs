//! Thin LAPACK wrappers for the dense complex eigenproblems used everywhere
//! else: `zheevd` for Hermitian matrices and `zgeev` (plus cluster
//! re-orthonormalization) for unitary one-period operators.

use ndarray::prelude::*;
use num_complex::Complex64;
use std::sync::Once;

pub type C64 = Complex64;

static BLAS_INIT: Once = Once::new();

extern "C" {
    fn openblas_set_num_threads(num: core::ffi::c_int);
}

/// Pin OpenBLAS to one thread. Concurrency lives at the quartet / sector /
/// Hamiltonian level via rayon, where single-threaded LAPACK calls scale
/// better than nested BLAS threading on the matrix sizes used here.
pub fn limit_blas_threads() {
    BLAS_INIT.call_once(|| unsafe { openblas_set_num_threads(1) });
}

fn to_col_major(a: &Array2<C64>) -> Vec<C64> {
    let n = a.nrows();
    let mut out = Vec::with_capacity(n * n);
    for col in 0..n {
        for row in 0..n {
            out.push(a[[row, col]]);
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix via the divide-and-conquer
/// driver. Returns ascending eigenvalues and the unitary matrix whose
/// columns are the eigenvectors.
pub fn eigh(a: &Array2<C64>) -> (Array1<f64>, Array2<C64>) {
    limit_blas_threads();
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh: matrix must be square");
    let ni = n as i32;
    let mut af = to_col_major(a);
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    unsafe {
        // workspace query
        let (mut wkopt, mut rwkopt, mut iwkopt) = (C64::new(0.0, 0.0), 0.0f64, 0i32);
        let m1 = -1i32;
        lapack_sys::zheevd_(
            &(b'V' as std::ffi::c_char),
            &(b'L' as std::ffi::c_char),
            &ni,
            af.as_mut_ptr() as *mut _,
            &ni,
            w.as_mut_ptr(),
            &mut wkopt as *mut _ as *mut _,
            &m1,
            &mut rwkopt,
            &m1,
            &mut iwkopt,
            &m1,
            &mut info,
        );
        let lwork = wkopt.re as i32;
        let lrwork = rwkopt as i32;
        let liwork = iwkopt;
        let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
        let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        lapack_sys::zheevd_(
            &(b'V' as std::ffi::c_char),
            &(b'L' as std::ffi::c_char),
            &ni,
            af.as_mut_ptr() as *mut _,
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _,
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "zheevd failed with info = {info}");
    let vecs = Array2::from_shape_vec((n, n).f(), af).expect("zheevd output shape");
    (Array1::from(w), vecs)
}

/// Eigenvalues of a Hermitian matrix (no vectors), ascending.
pub fn eigvalsh(a: &Array2<C64>) -> Array1<f64> {
    limit_blas_threads();
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigvalsh: matrix must be square");
    let ni = n as i32;
    let mut af = to_col_major(a);
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    unsafe {
        let (mut wkopt, mut rwkopt, mut iwkopt) = (C64::new(0.0, 0.0), 0.0f64, 0i32);
        let m1 = -1i32;
        lapack_sys::zheevd_(
            &(b'N' as std::ffi::c_char),
            &(b'L' as std::ffi::c_char),
            &ni,
            af.as_mut_ptr() as *mut _,
            &ni,
            w.as_mut_ptr(),
            &mut wkopt as *mut _ as *mut _,
            &m1,
            &mut rwkopt,
            &m1,
            &mut iwkopt,
            &m1,
            &mut info,
        );
        let lwork = wkopt.re as i32;
        let lrwork = rwkopt as i32;
        let liwork = iwkopt;
        let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
        let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        lapack_sys::zheevd_(
            &(b'N' as std::ffi::c_char),
            &(b'L' as std::ffi::c_char),
            &ni,
            af.as_mut_ptr() as *mut _,
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _,
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    assert_eq!(info, 0, "zheevd (values only) failed with info = {info}");
    Array1::from(w)
}

/// Eigendecomposition of a unitary (hence normal) matrix with an
/// orthonormal eigenbasis: `u = W diag(w) W^dagger`.
///
/// Uses the complex Schur decomposition `u = Q T Q^dagger`: for a normal
/// matrix `T` is diagonal up to rounding, so the Schur vectors are an
/// orthonormal eigenbasis by construction, with no per-cluster
/// re-orthogonalization games. The eigen-residual is asserted before
/// returning.
pub fn eig_unitary(u: &Array2<C64>) -> (Array1<C64>, Array2<C64>) {
    limit_blas_threads();
    let n = u.nrows();
    assert_eq!(n, u.ncols(), "eig_unitary: matrix must be square");
    let ni = n as i32;
    let mut t = to_col_major(u);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut vs = vec![C64::new(0.0, 0.0); n * n];
    let mut rwork = vec![0.0f64; n];
    let mut sdim = 0i32;
    let mut info = 0i32;
    unsafe {
        let mut wkopt = C64::new(0.0, 0.0);
        let m1 = -1i32;
        lapack_sys::zgees_(
            &(b'V' as std::ffi::c_char),
            &(b'N' as std::ffi::c_char),
            None,
            &ni,
            t.as_mut_ptr() as *mut _,
            &ni,
            &mut sdim,
            w.as_mut_ptr() as *mut _,
            vs.as_mut_ptr() as *mut _,
            &ni,
            &mut wkopt as *mut _ as *mut _,
            &m1,
            rwork.as_mut_ptr(),
            std::ptr::null_mut(),
            &mut info,
        );
        let lwork = wkopt.re as i32;
        let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
        lapack_sys::zgees_(
            &(b'V' as std::ffi::c_char),
            &(b'N' as std::ffi::c_char),
            None,
            &ni,
            t.as_mut_ptr() as *mut _,
            &ni,
            &mut sdim,
            w.as_mut_ptr() as *mut _,
            vs.as_mut_ptr() as *mut _,
            &ni,
            work.as_mut_ptr() as *mut _,
            &lwork,
            rwork.as_mut_ptr(),
            std::ptr::null_mut(),
            &mut info,
        );
    }
    assert_eq!(info, 0, "zgees failed with info = {info}");
    let w = Array1::from(w);
    let v = Array2::from_shape_vec((n, n).f(), vs).expect("zgees output shape");

    // residual check: U W = W diag(w)
    let uw = u.dot(&v);
    let mut resid: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            resid = resid.max((uw[[i, j]] - v[[i, j]] * w[j]).norm());
        }
    }
    assert!(
        resid < 1e-9,
        "eig_unitary: input is not normal enough (eigen-residual {resid:.2e})"
    );
    (w, v)
}

/// `conj(a) . b` over equal-length 1-D views (the physicists' inner product).
pub fn vdot(a: &ArrayView1<C64>, b: &ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `a . x` accumulated over columns, which walks the column-major storage
/// the eigendecompositions return without transposing anything.
pub fn matvec(a: &Array2<C64>, x: &Array1<C64>) -> Array1<C64> {
    let mut y = Array1::<C64>::zeros(a.nrows());
    for (j, col) in a.columns().into_iter().enumerate() {
        let xj = x[j];
        if xj.norm_sqr() == 0.0 {
            continue;
        }
        y.zip_mut_with(&col, |acc, &c| *acc += c * xj);
    }
    y
}

/// `a^dagger . x` as one conjugated dot per column; no transposed copy.
pub fn adjoint_matvec(a: &Array2<C64>, x: &Array1<C64>) -> Array1<C64> {
    a.columns()
        .into_iter()
        .map(|col| vdot(&col, &x.view()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn eigh_reconstructs_hermitian_matrix() {
        let n = 24;
        let mut a = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..=i {
                let re = ((i * 37 + j * 11) % 13) as f64 - 6.0;
                let im = if i == j {
                    0.0
                } else {
                    ((i * 5 + j * 3) % 7) as f64 - 3.0
                };
                a[[i, j]] = C64::new(re, im);
                a[[j, i]] = C64::new(re, -im);
            }
        }
        let (w, v) = eigh(&a);
        for j in 0..n {
            let av = a.dot(&v.column(j).to_owned());
            for i in 0..n {
                assert!((av[i] - v[[i, j]] * w[j]).norm() < 1e-10);
            }
        }
        // ascending
        for j in 1..n {
            assert!(w[j] >= w[j - 1]);
        }
    }

    #[test]
    fn eig_unitary_handles_degenerate_spectrum() {
        // diag(1, 1, -1, i) conjugated by a random-ish unitary from eigh
        let mut h = Array2::<C64>::zeros((4, 4));
        for i in 0..4 {
            for j in 0..=i {
                let re = ((i * 7 + j * 3) % 5) as f64 - 2.0;
                let im = if i == j {
                    0.0
                } else {
                    ((i + 2 * j) % 3) as f64 - 1.0
                };
                h[[i, j]] = C64::new(re, im);
                h[[j, i]] = C64::new(re, -im);
            }
        }
        let (_, q) = eigh(&h);
        let d = Array2::from_diag(&array![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 1.0)
        ]);
        let u = q.dot(&d).dot(&q.t().mapv(|z| z.conj()));
        let (w, vv) = eig_unitary(&u);
        for j in 0..4 {
            assert!((w[j].norm() - 1.0).abs() < 1e-12);
            let uv = u.dot(&vv.column(j).to_owned());
            for i in 0..4 {
                assert!((uv[i] - vv[[i, j]] * w[j]).norm() < 1e-9);
            }
        }
    }
}
