//! C ABI over the h2d library.
//!
//! Every function returns an [`H2dStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be read with
//! [`h2d_last_error_message`]. Objects created here (matrices, series
//! results, reports) are opaque and must be released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use h2d::harness::{self, CampaignConfig, HarnessError, Report, RunOptions};
use h2d::qseries::{self, QCount, QParameter};
use h2d::{ks, poly, ComplexSquareMatrix, Error, PolyIndex, SeriesResult, TruncationPolicy};
use num_complex::Complex64;

/// Status code returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H2dStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    ZeroParameter = 3,
    DomainViolation = 4,
    Asymmetry = 5,
    IllConditioned = 6,
    TruncationNotConverged = 7,
    QuadratureUnderResolved = 8,
    NotSpd = 9,
    NotPd = 10,
    DivergentProduct = 11,
    ConfigError = 12,
    IoError = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct H2dComplex {
    pub re: f64,
    pub im: f64,
}

impl From<H2dComplex> for Complex64 {
    fn from(z: H2dComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for H2dComplex {
    fn from(z: Complex64) -> Self {
        H2dComplex { re: z.re, im: z.im }
    }
}

/// Stopping rule for the multilinear series.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2dTruncationPolicy {
    pub max_degree: u32,
    pub shell_tol: f64,
    pub quiet_shells: u32,
}

impl From<H2dTruncationPolicy> for TruncationPolicy {
    fn from(p: H2dTruncationPolicy) -> Self {
        TruncationPolicy {
            max_degree: p.max_degree,
            shell_tol: p.shell_tol,
            quiet_shells: p.quiet_shells,
        }
    }
}

/// Closed form against its numerical counterpart.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct H2dComparison {
    pub lhs: H2dComplex,
    pub rhs: H2dComplex,
    pub abs_err: f64,
}

/// Opaque square complex matrix.
pub struct H2dMatrix(ComplexSquareMatrix);

/// Opaque series result.
pub struct H2dSeries(SeriesResult);

/// Opaque campaign report.
pub struct H2dReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> H2dStatus {
    match e {
        Error::ZeroParameter(_) => H2dStatus::ZeroParameter,
        Error::DomainViolation(_) => H2dStatus::DomainViolation,
        Error::Asymmetry(_) => H2dStatus::Asymmetry,
        Error::IllConditioned(_) => H2dStatus::IllConditioned,
        Error::TruncationNotConverged(_) => H2dStatus::TruncationNotConverged,
        Error::QuadratureUnderResolved { .. } => H2dStatus::QuadratureUnderResolved,
        Error::NotSpd => H2dStatus::NotSpd,
        Error::NotPd => H2dStatus::NotPd,
        Error::DivergentProduct(_) => H2dStatus::DivergentProduct,
        Error::InvalidInput(_) => H2dStatus::InvalidInput,
    }
}

enum Failure {
    Lib(Error),
    Harness(HarnessError),
    Null(&'static str),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Harness(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> H2dStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            H2dStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Harness(e))) => {
            set_error(e.to_string());
            match e {
                HarnessError::Config(_) => H2dStatus::ConfigError,
                HarnessError::Io(_) => H2dStatus::IoError,
            }
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("`{name}` is null"));
            H2dStatus::NullPointer
        }
        Ok(Err(Failure::Input(msg))) => {
            set_error(msg);
            H2dStatus::InvalidInput
        }
        Err(_) => {
            set_error("internal panic");
            H2dStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Copies `text` into `buf` (NUL-terminated, truncated to `len`) and
/// returns the length needed without the terminator.
unsafe fn copy_out(text: &str, buf: *mut c_char, len: usize) -> usize {
    if !buf.is_null() && len > 0 {
        let n = text.len().min(len - 1);
        ptr::copy_nonoverlapping(text.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
    }
    text.len()
}

/// Message of the last failed call on this thread. Writes at most `len`
/// bytes including the terminator and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn h2d_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| copy_out(&e.borrow(), buf, len))
}

/// Physicists' Hermite polynomial H_n(x) at a complex argument.
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_hermite(n: u32, x: H2dComplex, result: *mut H2dComplex) -> H2dStatus {
    guard(|| {
        *out(result, "result")? = poly::hermite(n, x.into()).into();
        Ok(())
    })
}

/// Generalized Laguerre polynomial L_n^{(alpha)}(x), any integer alpha.
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_laguerre(
    n: u32,
    alpha: i64,
    x: H2dComplex,
    result: *mut H2dComplex,
) -> H2dStatus {
    guard(|| {
        *out(result, "result")? = poly::laguerre(n, alpha, x.into()).into();
        Ok(())
    })
}

/// 2D Hermite polynomial H_{m,n}(z1, z2) by its finite sum.
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_h2d(
    m: u32,
    n: u32,
    z1: H2dComplex,
    z2: H2dComplex,
    result: *mut H2dComplex,
) -> H2dStatus {
    guard(|| {
        *out(result, "result")? =
            poly::h2d_direct(PolyIndex::new(m, n), z1.into(), z2.into()).into();
        Ok(())
    })
}

/// 2D Hermite polynomial through its Laguerre connection.
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_h2d_laguerre(
    m: u32,
    n: u32,
    z1: H2dComplex,
    z2: H2dComplex,
    result: *mut H2dComplex,
) -> H2dStatus {
    guard(|| {
        *out(result, "result")? =
            poly::h2d_laguerre(PolyIndex::new(m, n), z1.into(), z2.into()).into();
        Ok(())
    })
}

/// Default stopping rule for the real series.
#[no_mangle]
pub extern "C" fn h2d_policy_real_default() -> H2dTruncationPolicy {
    let p = TruncationPolicy::real_default();
    H2dTruncationPolicy {
        max_degree: p.max_degree,
        shell_tol: p.shell_tol,
        quiet_shells: p.quiet_shells,
    }
}

/// Default stopping rule for the complex series.
#[no_mangle]
pub extern "C" fn h2d_policy_complex_default() -> H2dTruncationPolicy {
    let p = TruncationPolicy::complex_default();
    H2dTruncationPolicy {
        max_degree: p.max_degree,
        shell_tol: p.shell_tol,
        quiet_shells: p.quiet_shells,
    }
}

/// New `dim` x `dim` matrix from row-major entries.
///
/// # Safety
/// `entries` must hold `dim * dim` values; `matrix` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_matrix_new(
    dim: usize,
    entries: *const H2dComplex,
    matrix: *mut *mut H2dMatrix,
) -> H2dStatus {
    guard(|| {
        let m = out(matrix, "matrix")?;
        if dim == 0 {
            return Err(Failure::Input("matrix dimension must be positive".into()));
        }
        let e = slice(
            entries,
            dim.checked_mul(dim)
                .ok_or(Failure::Input("dimension overflows".into()))?,
            "entries",
        )?;
        let a = ComplexSquareMatrix::from_fn(dim, |i, j| e[i * dim + j].into());
        *m = Box::into_raw(Box::new(H2dMatrix(a)));
        Ok(())
    })
}

/// # Safety
/// `matrix` must be null or come from [`h2d_matrix_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn h2d_matrix_free(matrix: *mut H2dMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

fn real_rows(m: &ComplexSquareMatrix) -> Result<Vec<Vec<f64>>, Failure> {
    if !m.is_real(0.0) {
        return Err(Failure::Input("the real series needs a real matrix".into()));
    }
    Ok(m.rows()
        .iter()
        .map(|r| r.iter().map(|z| z.re).collect())
        .collect())
}

unsafe fn store_series(
    r: h2d::Result<SeriesResult>,
    series: *mut *mut H2dSeries,
) -> Result<(), Failure> {
    let slot = out(series, "series")?;
    *slot = ptr::null_mut();
    match r {
        Ok(s) => {
            *slot = Box::into_raw(Box::new(H2dSeries(s)));
            Ok(())
        }
        Err(Error::TruncationNotConverged(partial)) => {
            let e = Error::TruncationNotConverged(partial.clone());
            *slot = Box::into_raw(Box::new(H2dSeries(*partial)));
            Err(e.into())
        }
        Err(e) => Err(e.into()),
    }
}

/// Real multilinear series for symmetric S (real entries) and X.
/// On `TruncationNotConverged` the partial result is still returned.
///
/// # Safety
/// Pointers must be valid; `x` must hold as many entries as `s` has rows.
#[no_mangle]
pub unsafe extern "C" fn h2d_series_real(
    s: *const H2dMatrix,
    x: *const f64,
    policy: H2dTruncationPolicy,
    series: *mut *mut H2dSeries,
) -> H2dStatus {
    guard(|| {
        let s = &s.as_ref().ok_or(Failure::Null("s"))?.0;
        let x = slice(x, s.dim(), "x")?;
        let rows = real_rows(s)?;
        store_series(ks::rhs_real(&rows, x, &policy.into()), series)
    })
}

/// det(I+S)^{-1/2} exp(X^T S (I+S)^{-1} X).
///
/// # Safety
/// Pointers must be valid; `x` must hold as many entries as `s` has rows.
#[no_mangle]
pub unsafe extern "C" fn h2d_kernel_real(
    s: *const H2dMatrix,
    x: *const f64,
    result: *mut f64,
) -> H2dStatus {
    guard(|| {
        let s = &s.as_ref().ok_or(Failure::Null("s"))?.0;
        let x = slice(x, s.dim(), "x")?;
        let rows = real_rows(s)?;
        *out(result, "result")? = ks::lhs_real(&rows, x)?;
        Ok(())
    })
}

/// Complex multilinear series for H and W.
/// On `TruncationNotConverged` the partial result is still returned.
///
/// # Safety
/// Pointers must be valid; `w` must hold as many entries as `h` has rows.
#[no_mangle]
pub unsafe extern "C" fn h2d_series_complex(
    h: *const H2dMatrix,
    w: *const H2dComplex,
    policy: H2dTruncationPolicy,
    series: *mut *mut H2dSeries,
) -> H2dStatus {
    guard(|| {
        let h = &h.as_ref().ok_or(Failure::Null("h"))?.0;
        let w: Vec<Complex64> = slice(w, h.dim(), "w")?.iter().map(|&z| z.into()).collect();
        store_series(ks::rhs_complex(h, &w, &policy.into()), series)
    })
}

/// det(I+H)^{-1} exp(W* H (I+H)^{-1} W).
///
/// # Safety
/// Pointers must be valid; `w` must hold as many entries as `h` has rows.
#[no_mangle]
pub unsafe extern "C" fn h2d_kernel_complex(
    h: *const H2dMatrix,
    w: *const H2dComplex,
    result: *mut H2dComplex,
) -> H2dStatus {
    guard(|| {
        let h = &h.as_ref().ok_or(Failure::Null("h"))?.0;
        let w: Vec<Complex64> = slice(w, h.dim(), "w")?.iter().map(|&z| z.into()).collect();
        *out(result, "result")? = ks::lhs_complex(h, &w)?.into();
        Ok(())
    })
}

/// # Safety
/// `series` must come from a series function; `result` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_series_value(
    series: *const H2dSeries,
    result: *mut H2dComplex,
) -> H2dStatus {
    guard(|| {
        let s = &series.as_ref().ok_or(Failure::Null("series"))?.0;
        *out(result, "result")? = s.value.into();
        Ok(())
    })
}

/// Degree reached and convergence flag.
///
/// # Safety
/// `series` must come from a series function; out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_series_info(
    series: *const H2dSeries,
    degree_reached: *mut u32,
    converged: *mut bool,
) -> H2dStatus {
    guard(|| {
        let s = &series.as_ref().ok_or(Failure::Null("series"))?.0;
        *out(degree_reached, "degree_reached")? = s.degree_reached;
        *out(converged, "converged")? = s.converged;
        Ok(())
    })
}

/// # Safety
/// `series` must be null or come from a series function, freed once.
#[no_mangle]
pub unsafe extern "C" fn h2d_series_free(series: *mut H2dSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// q-shifted factorial (a;q)_n; a negative `n` gives the infinite product.
///
/// # Safety
/// `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_qpoch(
    a: H2dComplex,
    q: f64,
    n: i64,
    result: *mut H2dComplex,
) -> H2dStatus {
    guard(|| {
        let qp = QParameter::new(q)?;
        let count = if n < 0 {
            QCount::Infinite
        } else {
            QCount::Finite(u32::try_from(n).map_err(|_| Failure::Input("n is too large".into()))?)
        };
        *out(result, "result")? = qseries::qpoch(a.into(), &qp, count)?.into();
        Ok(())
    })
}

/// Askey-Wilson integral by quadrature against its closed form.
///
/// # Safety
/// `t` must hold 4 values; `result` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_askey_wilson(
    t: *const H2dComplex,
    q: f64,
    points: usize,
    result: *mut H2dComparison,
) -> H2dStatus {
    guard(|| {
        let t = slice(t, 4, "t")?;
        let qp = QParameter::new(q)?;
        let c = qseries::askey_wilson_integral(
            [t[0].into(), t[1].into(), t[2].into(), t[3].into()],
            &qp,
            points,
        )?;
        *out(result, "result")? = H2dComparison {
            lhs: c.lhs.into(),
            rhs: c.rhs.into(),
            abs_err: c.abs_err,
        };
        Ok(())
    })
}

/// Runs a campaign. `config` is TOML text or null for the bundled
/// campaign; `seed` overrides the configured seed when `use_seed` is set;
/// `jobs` 0 means all cores. Timing fields are omitted.
///
/// # Safety
/// `config` must be null or NUL-terminated; `report` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn h2d_campaign_run(
    config: *const c_char,
    use_seed: bool,
    seed: u64,
    jobs: usize,
    report: *mut *mut H2dReport,
) -> H2dStatus {
    guard(|| {
        let slot = out(report, "report")?;
        *slot = ptr::null_mut();
        let cfg = if config.is_null() {
            CampaignConfig::bundled()
        } else {
            let text = CStr::from_ptr(config)
                .to_str()
                .map_err(|_| Failure::Input("config is not UTF-8".into()))?;
            CampaignConfig::parse(text)?
        };
        let opts = RunOptions {
            jobs,
            seed: use_seed.then_some(seed),
            filter: None,
            timing: false,
        };
        *slot = Box::into_raw(Box::new(H2dReport(harness::run_campaign(&cfg, &opts)?)));
        Ok(())
    })
}

/// Exit code of the campaign: 0 when nothing failed, 1 otherwise.
///
/// # Safety
/// `report` must come from [`h2d_campaign_run`].
#[no_mangle]
pub unsafe extern "C" fn h2d_report_exit_code(report: *const H2dReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.0.summary.exit_code)
}

/// Check counts of the campaign.
///
/// # Safety
/// `report` must come from [`h2d_campaign_run`]; out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn h2d_report_counts(
    report: *const H2dReport,
    total: *mut usize,
    pass: *mut usize,
    fail: *mut usize,
) -> H2dStatus {
    guard(|| {
        let c = &report
            .as_ref()
            .ok_or(Failure::Null("report"))?
            .0
            .summary
            .counts;
        *out(total, "total")? = c.total;
        *out(pass, "pass")? = c.pass;
        *out(fail, "fail")? = c.fail;
        Ok(())
    })
}

/// JSON report into `buf` (NUL-terminated, truncated to `len`); returns
/// the full length, so a null `buf` queries the size.
///
/// # Safety
/// `report` must come from [`h2d_campaign_run`]; `buf` null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn h2d_report_json(
    report: *const H2dReport,
    buf: *mut c_char,
    len: usize,
) -> usize {
    match report.as_ref() {
        Some(r) => copy_out(&r.0.to_json(), buf, len),
        None => 0,
    }
}

/// # Safety
/// `report` must be null or come from [`h2d_campaign_run`], freed once.
#[no_mangle]
pub unsafe extern "C" fn h2d_report_free(report: *mut H2dReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
