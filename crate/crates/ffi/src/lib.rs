//! C ABI over the `nullgauge` simulator.
//!
//! Every fallible function returns an [`ng_status`]. On failure the message
//! is kept per thread and read back with [`ng_last_error_message`]. Handles
//! are opaque and each kind has a matching `*_free`. Panics never cross the boundary; they surface as
//! `NG_PANIC`.
#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{self, AssertUnwindSafe};

use num_complex::Complex64;

use nullgauge::em_only::{em_only_step, reconstruct, ReconstructionConfig};
use nullgauge::initial::{self, PacketParams};
use nullgauge::kgm::{kgm_diagnostics, kgm_step};
use nullgauge::majorana::{axial_current, dirac_current, phase_factorization, GammaSet, Spinor};
use nullgauge::unitary::{to_unitary, unitary_diagnostics, unitary_step};
use nullgauge::{ComplexKgmState, EmOnlyState, Error, GridSpec, PhysicalConstants, UnitaryState};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ng_status {
    NG_OK = 0,
    NG_NULL_POINTER = 1,
    NG_INVALID_ARGUMENT = 2,
    NG_LENGTH_MISMATCH = 3,
    /// The evolution or reconstruction broke down (node, vanishing B0,
    /// negative radicand, non-finite value).
    NG_BREAKDOWN = 4,
    /// A spinor failed an algebraic precondition.
    NG_ALGEBRA = 5,
    NG_PANIC = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ng_grid {
    pub n_x: usize,
    pub dx: f64,
    pub dt: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ng_constants {
    pub e: f64,
    pub m: f64,
    /// Uniform background charge density.
    pub background: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ng_packet {
    pub phi0: f64,
    pub amplitude: f64,
    pub width: f64,
    pub chirp: f64,
    pub kick: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ng_complex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ng_field {
    NG_FIELD_PHI = 0,
    NG_FIELD_PHI_DOT = 1,
    NG_FIELD_B0 = 2,
    NG_FIELD_B1 = 3,
    NG_FIELD_B0_DOT = 4,
    NG_FIELD_B1_DOT = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ng_representation {
    NG_REP_DIRAC = 0,
    NG_REP_MAJORANA = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ng_diagnostics {
    pub t: f64,
    pub charge: f64,
    pub energy: f64,
    /// Lorenz-gauge residual for complex states, Gauss-law residual for
    /// unitary states.
    pub constraint_max: f64,
    /// Max current divergence (complex) or conservation residual (unitary).
    pub conservation_max: f64,
}

/// Complex field plus potential in the Lorenz gauge.
pub struct ng_kgm {
    grid: GridSpec,
    consts: PhysicalConstants,
    state: ComplexKgmState,
}

/// Real scalar plus unitary-gauge potential.
pub struct ng_unitary {
    grid: GridSpec,
    consts: PhysicalConstants,
    state: UnitaryState,
}

/// Potential-only evolution with the matter field reconstructed each stage.
pub struct ng_em_only {
    grid: GridSpec,
    consts: PhysicalConstants,
    cfg: ReconstructionConfig,
    state: EmOnlyState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(ng_status, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::LengthMismatch { .. } => ng_status::NG_LENGTH_MISMATCH,
            Error::ZeroSpinor
            | Error::DegenerateSpinor { .. }
            | Error::AxialCurrentNonzero { .. }
            | Error::DegeneratePhase { .. } => ng_status::NG_ALGEBRA,
            e if e.is_breakdown() => ng_status::NG_BREAKDOWN,
            _ => ng_status::NG_INVALID_ARGUMENT,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ng_status {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ng_status::NG_OK
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            ng_status::NG_PANIC
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(ng_status::NG_NULL_POINTER, format!("{what} is null"))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, expected: usize) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(null("output buffer"));
    }
    if len != expected {
        return Err(Error::LengthMismatch { expected, got: len }.into());
    }
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn grid_of(g: &ng_grid) -> Result<GridSpec, Fail> {
    Ok(GridSpec::new(g.n_x, g.dx, g.dt)?)
}

fn consts_of(c: &ng_constants) -> Result<PhysicalConstants, Fail> {
    if !c.background.is_finite() {
        return Err(Error::InvalidConstants("background must be finite".into()).into());
    }
    Ok(PhysicalConstants::new(c.e, c.m)?.with_background(c.background))
}

fn gammas(rep: ng_representation) -> GammaSet {
    match rep {
        ng_representation::NG_REP_DIRAC => GammaSet::dirac(),
        ng_representation::NG_REP_MAJORANA => GammaSet::majorana(),
    }
}

unsafe fn read_spinor(p: *const ng_complex) -> Result<Spinor, Fail> {
    if p.is_null() {
        return Err(null("spinor"));
    }
    let s = unsafe { std::slice::from_raw_parts(p, 4) };
    Ok(Spinor::from_fn(|i, _| Complex64::new(s[i].re, s[i].im)))
}

/// Message for the most recent failure on this thread, or an empty string
/// after a success. The pointer stays valid until the next `ng_*` call on
/// the same thread.
#[no_mangle]
pub extern "C" fn ng_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ng_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Localised wave packet on a uniform background. The background density it
/// requires is written to `background_out` when that is non-null and stored
/// in the handle, overriding `consts.background`.
///
/// # Safety
/// `params` may be null (defaults are used). `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ng_kgm_packet(
    grid: ng_grid,
    consts: ng_constants,
    params: *const ng_packet,
    background_out: *mut f64,
    out: *mut *mut ng_kgm,
) -> ng_status {
    guard(|| {
        let grid = grid_of(&grid)?;
        let consts = consts_of(&consts)?;
        let p = match unsafe { params.as_ref() } {
            Some(p) => PacketParams {
                phi0: p.phi0,
                amplitude: p.amplitude,
                width: p.width,
                chirp: p.chirp,
                kick: p.kick,
            },
            None => PacketParams::default(),
        };
        let (state, background) = initial::packet(&grid, &consts, &p)?;
        if let Some(b) = unsafe { background_out.as_mut() } {
            *b = background;
        }
        put(
            out,
            ng_kgm {
                grid,
                consts: consts.with_background(background),
                state,
            },
        )
    })
}

/// Complex state at `t = 0` from caller buffers of length `grid.n_x`.
///
/// # Safety
/// All pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn ng_kgm_new(
    grid: ng_grid,
    consts: ng_constants,
    psi: *const ng_complex,
    psi_dot: *const ng_complex,
    a0: *const f64,
    a1: *const f64,
    a0_dot: *const f64,
    a1_dot: *const f64,
    out: *mut *mut ng_kgm,
) -> ng_status {
    guard(|| {
        let spec = grid_of(&grid)?;
        let consts = consts_of(&consts)?;
        let n = spec.n_x();
        let complex = |p: *const ng_complex| -> Result<Vec<Complex64>, Fail> {
            if p.is_null() {
                return Err(null("field"));
            }
            let s = unsafe { std::slice::from_raw_parts(p, n) };
            Ok(s.iter().map(|z| Complex64::new(z.re, z.im)).collect())
        };
        let real = |p: *const f64| -> Result<Vec<f64>, Fail> {
            if p.is_null() {
                return Err(null("field"));
            }
            Ok(unsafe { std::slice::from_raw_parts(p, n) }.to_vec())
        };
        let state = ComplexKgmState {
            psi: complex(psi)?.into(),
            psi_dot: complex(psi_dot)?.into(),
            a: [real(a0)?.into(), real(a1)?.into()],
            a_dot: [real(a0_dot)?.into(), real(a1_dot)?.into()],
            t: 0.0,
        };
        state.validate(&spec)?;
        put(
            out,
            ng_kgm {
                grid: spec,
                consts,
                state,
            },
        )
    })
}

/// # Safety
/// `h` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ng_kgm_free(h: *mut ng_kgm) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Advances `steps` time steps. On failure the handle keeps the last good
/// slice.
///
/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ng_kgm_step(h: *mut ng_kgm, steps: usize) -> ng_status {
    guard(|| {
        let h = unsafe { get_mut(h, "handle") }?;
        for _ in 0..steps {
            h.state = kgm_step(&h.state, &h.grid, &h.consts)?;
        }
        Ok(())
    })
}

/// # Safety
/// `h` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ng_kgm_diagnostics(h: *const ng_kgm, out: *mut ng_diagnostics) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        let out = unsafe { get_mut(out, "out") }?;
        let d = kgm_diagnostics(&h.state, &h.grid, &h.consts)?;
        *out = ng_diagnostics {
            t: h.state.t,
            charge: d.total_charge,
            energy: d.energy,
            constraint_max: d.lorenz_residual_max,
            conservation_max: d.current_divergence_max,
        };
        Ok(())
    })
}

/// Copies `|psi|` into `buf` (length must equal `n_x`).
///
/// # Safety
/// `h` must be valid and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ng_kgm_abs_psi(h: *const ng_kgm, buf: *mut f64, len: usize) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        let dst = unsafe { out_slice(buf, len, h.grid.n_x()) }?;
        dst.copy_from_slice(&h.state.abs_psi());
        Ok(())
    })
}

/// Gauge transform to the real field. `node_threshold` is relative to
/// `max |psi|`. `winding_out` may be null.
///
/// # Safety
/// `h` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ng_kgm_to_unitary(
    h: *const ng_kgm,
    node_threshold: f64,
    winding_out: *mut i64,
    out: *mut *mut ng_unitary,
) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        let r = to_unitary(&h.state, &h.grid, &h.consts, node_threshold)?;
        if let Some(w) = unsafe { winding_out.as_mut() } {
            *w = r.winding;
        }
        put(
            out,
            ng_unitary {
                grid: h.grid,
                consts: h.consts,
                state: r.unitary,
            },
        )
    })
}

/// # Safety
/// `h` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ng_unitary_free(h: *mut ng_unitary) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ng_unitary_step(h: *mut ng_unitary, steps: usize) -> ng_status {
    guard(|| {
        let h = unsafe { get_mut(h, "handle") }?;
        for _ in 0..steps {
            h.state = unitary_step(&h.state, &h.grid, &h.consts)?;
        }
        Ok(())
    })
}

/// # Safety
/// `h` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ng_unitary_diagnostics(h: *const ng_unitary, out: *mut ng_diagnostics) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        let out = unsafe { get_mut(out, "out") }?;
        let d = unitary_diagnostics(&h.state, &h.grid, &h.consts)?;
        *out = ng_diagnostics {
            t: h.state.t,
            charge: d.total_charge,
            energy: d.energy,
            constraint_max: d.gauss_residual_max,
            conservation_max: d.conservation_residual_max,
        };
        Ok(())
    })
}

fn unitary_field(s: &UnitaryState, which: ng_field) -> &[f64] {
    match which {
        ng_field::NG_FIELD_PHI => &s.phi,
        ng_field::NG_FIELD_PHI_DOT => &s.phi_dot,
        ng_field::NG_FIELD_B0 => &s.b[0],
        ng_field::NG_FIELD_B1 => &s.b[1],
        ng_field::NG_FIELD_B0_DOT => &s.b_dot[0],
        ng_field::NG_FIELD_B1_DOT => &s.b_dot[1],
    }
}

/// Copies one field of the slice into `buf` (length must equal `n_x`).
///
/// # Safety
/// `h` must be valid and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ng_unitary_field(
    h: *const ng_unitary,
    which: ng_field,
    buf: *mut f64,
    len: usize,
) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        let dst = unsafe { out_slice(buf, len, h.grid.n_x()) }?;
        dst.copy_from_slice(unitary_field(&h.state, which));
        Ok(())
    })
}

/// Rebuilds `phi` and `phi_dot` from the potential alone, with floors scaled
/// from the current slice. Either output may be null.
///
/// # Safety
/// `h` must be valid; non-null buffers writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ng_unitary_reconstruct(
    h: *const ng_unitary,
    phi: *mut f64,
    phi_dot: *mut f64,
    len: usize,
) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        let em = h.state.to_em_only();
        let cfg = ReconstructionConfig::for_slice(&em, &h.grid, &h.consts)?;
        let r = reconstruct(&em, &h.grid, &h.consts, &cfg)?;
        for (p, src) in [(phi, &r.phi_rec), (phi_dot, &r.phi_dot_rec)] {
            if !p.is_null() {
                unsafe { out_slice(p, len, h.grid.n_x()) }?.copy_from_slice(src);
            }
        }
        Ok(())
    })
}

/// Drops the matter field and keeps only the potential, with
/// reconstruction floors scaled from this slice.
///
/// # Safety
/// `h` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ng_unitary_to_em_only(h: *const ng_unitary, out: *mut *mut ng_em_only) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        let state = h.state.to_em_only();
        let cfg = ReconstructionConfig::for_slice(&state, &h.grid, &h.consts)?;
        put(
            out,
            ng_em_only {
                grid: h.grid,
                consts: h.consts,
                cfg,
                state,
            },
        )
    })
}

/// # Safety
/// `h` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn ng_em_only_free(h: *mut ng_em_only) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `h` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ng_em_only_step(h: *mut ng_em_only, steps: usize) -> ng_status {
    guard(|| {
        let h = unsafe { get_mut(h, "handle") }?;
        for _ in 0..steps {
            h.state = em_only_step(&h.state, &h.grid, &h.consts, &h.cfg)?;
        }
        Ok(())
    })
}

/// # Safety
/// `h` and `t` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ng_em_only_time(h: *const ng_em_only, t: *mut f64) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        *unsafe { get_mut(t, "t") }? = h.state.t;
        Ok(())
    })
}

/// Copies a potential component. `NG_FIELD_PHI` and `NG_FIELD_PHI_DOT` are
/// reconstructed on the fly.
///
/// # Safety
/// `h` must be valid and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ng_em_only_field(
    h: *const ng_em_only,
    which: ng_field,
    buf: *mut f64,
    len: usize,
) -> ng_status {
    guard(|| {
        let h = unsafe { get(h, "handle") }?;
        let dst = unsafe { out_slice(buf, len, h.grid.n_x()) }?;
        let s = &h.state;
        match which {
            ng_field::NG_FIELD_B0 => dst.copy_from_slice(&s.b[0]),
            ng_field::NG_FIELD_B1 => dst.copy_from_slice(&s.b[1]),
            ng_field::NG_FIELD_B0_DOT => dst.copy_from_slice(&s.b_dot[0]),
            ng_field::NG_FIELD_B1_DOT => dst.copy_from_slice(&s.b_dot[1]),
            ng_field::NG_FIELD_PHI | ng_field::NG_FIELD_PHI_DOT => {
                let r = reconstruct(s, &h.grid, &h.consts, &h.cfg)?;
                let src = if which == ng_field::NG_FIELD_PHI {
                    &r.phi_rec
                } else {
                    &r.phi_dot_rec
                };
                dst.copy_from_slice(src);
            }
        }
        Ok(())
    })
}

/// Vector current `psi-bar gamma^mu psi` of a 4-spinor, written to `j[4]`.
///
/// # Safety
/// `psi` must point to 4 values, `j` to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ng_dirac_current(
    rep: ng_representation,
    psi: *const ng_complex,
    j: *mut f64,
) -> ng_status {
    guard(|| {
        let psi = unsafe { read_spinor(psi) }?;
        let dst = unsafe { out_slice(j, 4, 4) }?;
        dst.copy_from_slice(&dirac_current(&psi, &gammas(rep)).0);
        Ok(())
    })
}

/// Axial current `psi-bar gamma^mu gamma^5 psi`, written to `j[4]`.
///
/// # Safety
/// `psi` must point to 4 values, `j` to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ng_axial_current(
    rep: ng_representation,
    psi: *const ng_complex,
    j: *mut f64,
) -> ng_status {
    guard(|| {
        let psi = unsafe { read_spinor(psi) }?;
        let dst = unsafe { out_slice(j, 4, 4) }?;
        dst.copy_from_slice(&axial_current(&psi, &gammas(rep)).0);
        Ok(())
    })
}

/// Splits `psi = e^{i theta} phi` with `phi` Majorana. Fails with
/// `NG_ALGEBRA` when the axial current exceeds `axial_tolerance`.
///
/// # Safety
/// `psi` must point to 4 values; `theta` and `phi` (4 values) writable.
#[no_mangle]
pub unsafe extern "C" fn ng_phase_factorization(
    rep: ng_representation,
    psi: *const ng_complex,
    axial_tolerance: f64,
    theta: *mut f64,
    phi: *mut ng_complex,
) -> ng_status {
    guard(|| {
        let psi = unsafe { read_spinor(psi) }?;
        let theta = unsafe { get_mut(theta, "theta") }?;
        if phi.is_null() {
            return Err(null("phi"));
        }
        let (t, p) = phase_factorization(&psi, &gammas(rep), axial_tolerance)?;
        *theta = t;
        let dst = unsafe { std::slice::from_raw_parts_mut(phi, 4) };
        for (d, z) in dst.iter_mut().zip(p.iter()) {
            *d = ng_complex { re: z.re, im: z.im };
        }
        Ok(())
    })
}

/// Always returns `NG_PANIC`; lets bindings check the unwind guard.
#[no_mangle]
pub extern "C" fn ng_test_panic() -> ng_status {
    guard(|| panic!("requested by ng_test_panic"))
}
