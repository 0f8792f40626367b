use std::f64::consts::PI;

use fstirap_core::perturbation::{order2_terms_boundary, order2_terms_quadrature};
use fstirap_core::{Cplx, PulseProfile64, SystemParams64};
use proptest::prelude::*;

// int_0^T e^{i w t} dt
fn phase_integral(w: f64, t_f: f64) -> Cplx<f64> {
    if w == 0.0 {
        return Cplx::new(t_f, 0.0);
    }
    (Cplx::from_polar(1.0, w * t_f) - 1.0) / Cplx::new(0.0, w)
}

/// `F = int_0^T theta_dot(t) e^{i G0 t} dt` summed harmonic by harmonic.
fn rate_transform(g0: f64, prof: &PulseProfile64) -> Cplx<f64> {
    let t_f = prof.t_f();
    let alpha = prof.alpha();
    let mut f = phase_integral(g0, t_f) * alpha[0];
    for (k, &a) in alpha.iter().enumerate().skip(1) {
        let w = k as f64 * PI / t_f;
        f += (phase_integral(g0 + w, t_f) + phase_integral(g0 - w, t_f)) * (0.5 * a);
    }
    f
}

fn profile(t_f: f64, unit: &[f64]) -> PulseProfile64 {
    let a0 = PI / (4.0 * t_f);
    let h: Vec<f64> = unit.iter().map(|u| u * a0).collect();
    PulseProfile64::fixed_endpoint(t_f, &h).unwrap()
}

// The double integral of cos(G0 (t' - t)) over the triangle is |F|^2 / 2.
#[test]
fn nested_quadrature_matches_fourier_closed_form() {
    let p = SystemParams64::symmetric(1.0, 0.25, 0.0025).unwrap();
    for (t_f, unit) in [
        (60.0, vec![0.3, -0.9, 0.5, 0.1, -0.7, 0.8]),
        (60.0, vec![]),
        (23.5, vec![1.0, 1.0]),
        (9.0, vec![-0.4, 0.2, 0.6, -1.0]),
    ] {
        let prof = profile(t_f, &unit);
        let f = rate_transform(p.g0, &prof);
        let q = order2_terms_quadrature(&p, &prof).unwrap();
        assert!(
            (q.rho11 - 0.5 * f.norm_sqr()).abs() < 1e-9,
            "{t_f} {} {}",
            q.rho11,
            0.5 * f.norm_sqr()
        );
        let want13 = -Cplx::from_polar(0.5, -2.0 * t_f) * f * f;
        assert!((q.rho13 - want13).norm() < 1e-8);
    }
}

// Integrating F by parts once keeps (theta_dot(T) e^{i G0 T} - theta_dot(0)) / (i G0);
// the boundary form is exactly half the squared modulus of that.
#[test]
fn boundary_form_is_the_leading_integration_by_parts_term() {
    let p = SystemParams64::symmetric(1.0, 0.25, 0.0025).unwrap();
    let prof = profile(60.0, &[0.3, -0.9, 0.5, 0.1, -0.7, 0.8]);
    let (x, y) = (prof.rate_at_start(), prof.rate_at_end());
    let lead = (Cplx::from_polar(y, 60.0) - x) / Cplx::new(0.0, 1.0);
    let b = order2_terms_boundary(&p, &prof);
    assert!((b.rho11 - 0.5 * lead.norm_sqr()).abs() < 1e-15);
}

// Each cosine harmonic of frequency w carries the factor G0^2 / (G0^2 - w^2)
// in F, so the boundary form misses a relative w^2 / (G0^2 - w^2).
#[test]
fn boundary_remainder_follows_harmonic_frequency() {
    let p = SystemParams64::symmetric(1.0, 0.0, 0.0).unwrap();
    for (t_f, n) in [(60.0, 2usize), (60.0, 6), (120.0, 6), (240.0, 4)] {
        let mut unit = vec![0.0; n];
        unit[n - 1] = 1.0;
        let prof = profile(t_f, &unit);
        let w = n as f64 * PI / t_f;
        let exact = 0.5 * rate_transform(1.0, &prof).norm_sqr();
        let b = order2_terms_boundary(&p, &prof);
        // only the ramp piece is exact; the harmonic one is scaled
        let (x, y) = (prof.rate_at_start(), prof.rate_at_end());
        let a0 = prof.alpha()[0];
        let scale = 1.0 / (1.0 - w * w);
        let (hx, hy) = ((x - a0) * scale, (y - a0) * scale);
        let f = (Cplx::from_polar(a0 + hy, t_f) - (a0 + hx)) / Cplx::new(0.0, 1.0);
        assert!((exact - 0.5 * f.norm_sqr()).abs() < 1e-15, "{t_f} {n}");
        let lead = (Cplx::from_polar(y, t_f) - x) / Cplx::new(0.0, 1.0);
        assert!((b.rho11 - 0.5 * lead.norm_sqr()).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quadrature_matches_closed_form(
        t_f in 8.0f64..40.0,
        unit in proptest::collection::vec(-1.0f64..1.0, 0..=2).prop_map(|mut v| { if v.len() % 2 == 1 { v.pop(); } v }),
    ) {
        let p = SystemParams64::symmetric(1.0, 0.1, 0.0).unwrap();
        let prof = profile(t_f, &unit);
        let q = order2_terms_quadrature(&p, &prof).unwrap();
        let f = rate_transform(1.0, &prof);
        prop_assert!((q.rho11 - 0.5 * f.norm_sqr()).abs() < 1e-9);
        prop_assert!((q.rho22 + 2.0 * q.rho11).abs() < 1e-15);
        // the nested integral of the symmetric kernel is F^2 / 2
        let want = -Cplx::from_polar(0.5, -2.0 * t_f) * f * f;
        prop_assert!((q.rho13 - want).norm() < 1e-8, "{} {}", q.rho13, want);
    }
}
