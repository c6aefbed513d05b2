use std::ffi::{c_char, CString};
use std::ptr;

use h2d_ffi::*;

fn c(re: f64, im: f64) -> H2dComplex {
    H2dComplex { re, im }
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { h2d_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&b| b as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn polynomials() {
    let mut r = H2dComplex::default();
    unsafe {
        assert_eq!(h2d_hermite(2, c(1.0, 0.0), &mut r), H2dStatus::Ok);
        assert_eq!((r.re, r.im), (2.0, 0.0));
        // H_{1,1}(z1, z2) = z1 z2 - 1
        assert_eq!(
            h2d_h2d(1, 1, c(2.0, 0.0), c(3.0, 0.0), &mut r),
            H2dStatus::Ok
        );
        assert_eq!(r.re, 5.0);
        let mut l = H2dComplex::default();
        assert_eq!(
            h2d_h2d_laguerre(4, 2, c(0.3, 0.7), c(-1.1, 0.2), &mut l),
            H2dStatus::Ok
        );
        assert_eq!(
            h2d_h2d(4, 2, c(0.3, 0.7), c(-1.1, 0.2), &mut r),
            H2dStatus::Ok
        );
        assert!((l.re - r.re).abs() < 1e-12 && (l.im - r.im).abs() < 1e-12);
        assert_eq!(h2d_laguerre(1, 0, c(0.5, 0.0), &mut r), H2dStatus::Ok);
        assert_eq!(r.re, 0.5);
        assert_eq!(
            h2d_hermite(2, c(1.0, 0.0), ptr::null_mut()),
            H2dStatus::NullPointer
        );
    }
    assert!(last_error().contains("result"));
}

#[test]
fn real_series_matches_kernel() {
    let s = [c(0.1, 0.0), c(0.05, 0.0), c(0.05, 0.0), c(-0.12, 0.0)];
    let x = [0.4, -0.7];
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(h2d_matrix_new(2, s.as_ptr(), &mut m), H2dStatus::Ok);
        let mut lhs = 0.0;
        assert_eq!(h2d_kernel_real(m, x.as_ptr(), &mut lhs), H2dStatus::Ok);
        let mut series = ptr::null_mut();
        assert_eq!(
            h2d_series_real(m, x.as_ptr(), h2d_policy_real_default(), &mut series),
            H2dStatus::Ok
        );
        let mut v = H2dComplex::default();
        let (mut degree, mut converged) = (0u32, false);
        assert_eq!(h2d_series_value(series, &mut v), H2dStatus::Ok);
        assert_eq!(
            h2d_series_info(series, &mut degree, &mut converged),
            H2dStatus::Ok
        );
        assert!(converged && degree > 0);
        assert!((v.re - lhs).abs() < 1e-7 * (1.0 + lhs.abs()));
        h2d_series_free(series);
        h2d_matrix_free(m);
    }
}

#[test]
fn complex_series_errors_and_partials() {
    unsafe {
        let mut m = ptr::null_mut();
        let h = [c(0.2, 0.1), c(0.0, -0.3), c(0.1, 0.0), c(-0.2, 0.2)];
        assert_eq!(h2d_matrix_new(2, h.as_ptr(), &mut m), H2dStatus::Ok);
        let w = [c(0.5, 0.5), c(-1.0, 0.2)];
        let mut lhs = H2dComplex::default();
        assert_eq!(h2d_kernel_complex(m, w.as_ptr(), &mut lhs), H2dStatus::Ok);
        let mut series = ptr::null_mut();
        assert_eq!(
            h2d_series_complex(m, w.as_ptr(), h2d_policy_complex_default(), &mut series),
            H2dStatus::Ok
        );
        h2d_series_free(series);

        let tight = H2dTruncationPolicy {
            max_degree: 2,
            shell_tol: 1e-12,
            quiet_shells: 3,
        };
        let mut partial = ptr::null_mut();
        assert_eq!(
            h2d_series_complex(m, w.as_ptr(), tight, &mut partial),
            H2dStatus::TruncationNotConverged
        );
        assert!(!partial.is_null());
        let (mut degree, mut converged) = (0u32, true);
        h2d_series_info(partial, &mut degree, &mut converged);
        assert_eq!((degree, converged), (2, false));
        h2d_series_free(partial);
        h2d_matrix_free(m);

        let big = [c(0.9, 0.0), c(0.9, 0.0), c(0.9, 0.0), c(0.9, 0.0)];
        assert_eq!(h2d_matrix_new(2, big.as_ptr(), &mut m), H2dStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(
            h2d_series_complex(m, w.as_ptr(), h2d_policy_complex_default(), &mut out),
            H2dStatus::DomainViolation
        );
        assert!(out.is_null());
        assert!(!last_error().is_empty());
        h2d_matrix_free(m);

        assert_eq!(
            h2d_matrix_new(0, ptr::null(), &mut m),
            H2dStatus::InvalidInput
        );
    }
}

#[test]
fn q_functions() {
    let mut r = H2dComplex::default();
    unsafe {
        assert_eq!(h2d_qpoch(c(0.5, 0.0), 0.5, 2, &mut r), H2dStatus::Ok);
        assert!((r.re - 0.375).abs() < 1e-15);
        assert_eq!(
            h2d_qpoch(c(0.5, 0.0), 1.0, -1, &mut r),
            H2dStatus::DivergentProduct
        );
        let t = [c(0.3, 0.1), c(-0.2, 0.0), c(0.1, -0.4), c(0.0, 0.2)];
        let mut cmp = H2dComparison::default();
        assert_eq!(
            h2d_askey_wilson(t.as_ptr(), 0.5, 512, &mut cmp),
            H2dStatus::Ok
        );
        assert!(cmp.abs_err < 1e-8 * (1.0 + cmp.lhs.re.hypot(cmp.lhs.im)));
    }
}

#[test]
fn campaign_report() {
    let cfg = CString::new("[[suite]]\nid = \"mixed.origin\"\nmax_index = 2\n").unwrap();
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(
            h2d_campaign_run(cfg.as_ptr(), true, 7, 1, &mut rep),
            H2dStatus::Ok
        );
        assert_eq!(h2d_report_exit_code(rep), 0);
        let (mut total, mut pass, mut fail) = (0, 0, 0);
        assert_eq!(
            h2d_report_counts(rep, &mut total, &mut pass, &mut fail),
            H2dStatus::Ok
        );
        assert_eq!((total, pass, fail), (9, 9, 0));
        let n = h2d_report_json(rep, ptr::null_mut(), 0);
        let mut buf = vec![0 as c_char; n + 1];
        assert_eq!(h2d_report_json(rep, buf.as_mut_ptr(), buf.len()), n);
        let text: String = buf[..n].iter().map(|&b| b as u8 as char).collect();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["metadata"]["seed"], 7);
        h2d_report_free(rep);

        let bad = CString::new("[[suite]]\nid = \"nope\"\n").unwrap();
        assert_eq!(
            h2d_campaign_run(bad.as_ptr(), false, 0, 1, &mut rep),
            H2dStatus::ConfigError
        );
        assert!(rep.is_null());
        assert!(last_error().contains("nope"));
    }
}
