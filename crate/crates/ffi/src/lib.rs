//! C ABI over `relay_secrecy`.
//!
//! Every fallible function returns an [`RsStatus`]. On failure a message is
//! stored per thread and can be read with [`rs_last_error_message`]. Objects
//! are opaque handles created by `*_new`/`*_sample`/`*_from_json` and released
//! with the matching `*_free`. Strings handed out by the library are released
//! with [`rs_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use relay_secrecy::channel::{self, ChannelRealization, FadingConfig};
use relay_secrecy::pencil::{self, PencilSpec};
use relay_secrecy::schemes::{self, BeamformingWeights, Protected, RatePoint, RegionCurve, Scheme, SecondHop};
use relay_secrecy::{Complex64, Error, RateUnit};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    UnsupportedDimension = 3,
    Parse = 4,
    Io = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsRateUnit {
    Bits = 0,
    Nats = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsScheme {
    SingleNullD = 0,
    SingleNullE = 1,
    SingleNullUnion = 2,
    DoubleNull = 3,
    Tdma = 4,
    Outer = 5,
}

/// Which receiver a single null-space scheme keeps interference-free.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsProtected {
    E = 0,
    D = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RsComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RsRatePoint {
    pub r_d: f64,
    pub r_e: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsFadingConfig {
    pub m: usize,
    pub sigma_g: f64,
    pub sigma_h: f64,
    pub sigma_z: f64,
    pub n0: f64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsRegionSample {
    pub alpha: f64,
    pub r_d: f64,
    pub r_e: f64,
    pub on_frontier: bool,
    /// False for schemes without a protected receiver.
    pub has_protected: bool,
    pub protected_: RsProtected,
}

/// Opaque channel realization.
pub struct RsChannel(ChannelRealization);

/// Opaque sampled region of one scheme.
pub struct RsRegion(RegionCurve);

impl From<RsRateUnit> for RateUnit {
    fn from(u: RsRateUnit) -> Self {
        match u {
            RsRateUnit::Bits => RateUnit::Bits,
            RsRateUnit::Nats => RateUnit::Nats,
        }
    }
}

impl From<RsScheme> for Scheme {
    fn from(s: RsScheme) -> Self {
        match s {
            RsScheme::SingleNullD => Scheme::SingleNullD,
            RsScheme::SingleNullE => Scheme::SingleNullE,
            RsScheme::SingleNullUnion => Scheme::SingleNullUnion,
            RsScheme::DoubleNull => Scheme::DoubleNull,
            RsScheme::Tdma => Scheme::Tdma,
            RsScheme::Outer => Scheme::Outer,
        }
    }
}

impl From<RsProtected> for Protected {
    fn from(p: RsProtected) -> Self {
        match p {
            RsProtected::E => Protected::E,
            RsProtected::D => Protected::D,
        }
    }
}

impl From<RatePoint> for RsRatePoint {
    fn from(p: RatePoint) -> Self {
        Self { r_d: p.r_d, r_e: p.r_e }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = status_of(&e);
        Failure(status, e.to_string())
    }
}

fn status_of(e: &Error) -> RsStatus {
    match e {
        Error::InvalidInput(_) => RsStatus::InvalidInput,
        Error::UnsupportedDimension(_) => RsStatus::UnsupportedDimension,
        Error::Parse(_) => RsStatus::Parse,
        Error::Io(_) => RsStatus::Io,
        Error::Draw { source, .. } => status_of(source),
    }
}

fn null(what: &str) -> Failure {
    Failure(RsStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, turning errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            RsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn complex_slice(p: *const RsComplex, m: usize, what: &str) -> Result<Vec<Complex64>, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, m)
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect())
}

unsafe fn write_complex(out: *mut RsComplex, v: &[Complex64]) {
    if !out.is_null() {
        for (i, c) in v.iter().enumerate() {
            *out.add(i) = RsComplex { re: c.re, im: c.im };
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(RsStatus::InvalidInput, "string contains an interior NUL".into()))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RsStatus::InvalidInput, format!("{what} is not valid UTF-8")))
}

fn link(ch: &RsChannel) -> SecondHop<'_> {
    SecondHop::from(&ch.0)
}

/// Message of the last failed call on this thread, or null if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a channel from `m` gains to each destination and the noise variance.
#[no_mangle]
pub unsafe extern "C" fn rs_channel_new(
    h: *const RsComplex,
    z: *const RsComplex,
    m: usize,
    n0: f64,
    out: *mut *mut RsChannel,
) -> RsStatus {
    guard(|| {
        let h = complex_slice(h, m, "h")?;
        let z = complex_slice(z, m, "z")?;
        let ch = ChannelRealization::new(h, z, n0)?;
        write_out(out, Box::into_raw(Box::new(RsChannel(ch))), "out")
    })
}

/// Draw realization `draw_index` of the seeded Rayleigh ensemble.
#[no_mangle]
pub unsafe extern "C" fn rs_channel_sample(
    config: *const RsFadingConfig,
    draw_index: u64,
    out: *mut *mut RsChannel,
) -> RsStatus {
    guard(|| {
        let c = deref(config, "config")?;
        let cfg = FadingConfig {
            m: c.m,
            sigma_g: c.sigma_g,
            sigma_h: c.sigma_h,
            sigma_z: c.sigma_z,
            n0: c.n0,
            seed: c.seed,
        };
        let ch = channel::sample_channel(&cfg, draw_index)?;
        write_out(out, Box::into_raw(Box::new(RsChannel(ch))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn rs_channel_from_json(json: *const c_char, out: *mut *mut RsChannel) -> RsStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let ch = ChannelRealization::from_json(text)?;
        write_out(out, Box::into_raw(Box::new(RsChannel(ch))), "out")
    })
}

/// Serialize to JSON; free the result with [`rs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rs_channel_to_json(channel: *const RsChannel, out: *mut *mut c_char) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(ch.0.to_json())?;
        Ok(())
    })
}

/// Number of relays, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn rs_channel_relays(channel: *const RsChannel) -> usize {
    channel.as_ref().map_or(0, |c| c.0.m())
}

/// Copy the gains to each destination into caller buffers of length `m`.
/// Either buffer may be null.
#[no_mangle]
pub unsafe extern "C" fn rs_channel_gains(
    channel: *const RsChannel,
    h_out: *mut RsComplex,
    z_out: *mut RsComplex,
) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        write_complex(h_out, ch.0.h());
        write_complex(z_out, ch.0.z());
        Ok(())
    })
}

/// Capacity of the source-to-relays broadcast with source power `p_s`.
#[no_mangle]
pub unsafe extern "C" fn rs_channel_first_hop_capacity(
    channel: *const RsChannel,
    p_s: f64,
    unit: RsRateUnit,
    out: *mut f64,
) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        let c = ch.0.first_hop_capacity(p_s, unit.into())?;
        write_out(out, c, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn rs_channel_free(channel: *mut RsChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Largest generalized eigenvalue of `(n0 I + a h h^H, n0 I + b z z^H)`.
/// `eigvec_out`, if not null, receives a unit-norm maximizer of length `m`.
#[no_mangle]
pub unsafe extern "C" fn rs_pencil_eigmax(
    h: *const RsComplex,
    z: *const RsComplex,
    m: usize,
    a: f64,
    b: f64,
    n0: f64,
    lambda_out: *mut f64,
    eigvec_out: *mut RsComplex,
) -> RsStatus {
    guard(|| {
        let h = complex_slice(h, m, "h")?;
        let z = complex_slice(z, m, "z")?;
        let spec = PencilSpec::new(&h, &z, a, b, n0)?;
        let eig = pencil::pencil_eigmax(&spec);
        write_out(lambda_out, eig.lambda_max, "lambda_out")?;
        write_complex(eigvec_out, &eig.eigvec);
        Ok(())
    })
}

/// Rates delivered by arbitrary relay weights `w` (for D) and `u` (for E).
#[no_mangle]
pub unsafe extern "C" fn rs_achievable_rates(
    channel: *const RsChannel,
    w: *const RsComplex,
    u: *const RsComplex,
    unit: RsRateUnit,
    out: *mut RsRatePoint,
) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        let m = ch.0.m();
        let weights = BeamformingWeights {
            w: complex_slice(w, m, "w")?,
            u: complex_slice(u, m, "u")?,
            alpha: f64::NAN,
        };
        let p = schemes::achievable_rates(&link(ch), &weights, unit.into())?;
        write_out(out, p.into(), "out")
    })
}

unsafe fn finish_point(
    result: (RatePoint, BeamformingWeights),
    out: *mut RsRatePoint,
    w_out: *mut RsComplex,
    u_out: *mut RsComplex,
) -> Result<(), Failure> {
    let (p, wts) = result;
    write_out(out, p.into(), "out")?;
    write_complex(w_out, &wts.w);
    write_complex(u_out, &wts.u);
    Ok(())
}

/// Single null-space point at power split `alpha`. `w_out`/`u_out` may be
/// null; otherwise they receive `m` weights each.
#[no_mangle]
pub unsafe extern "C" fn rs_single_null_point(
    channel: *const RsChannel,
    p_r: f64,
    alpha: f64,
    protected_: RsProtected,
    unit: RsRateUnit,
    out: *mut RsRatePoint,
    w_out: *mut RsComplex,
    u_out: *mut RsComplex,
) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        let r = schemes::single_null_point(&link(ch), p_r, alpha, protected_.into(), unit.into())?;
        finish_point(r, out, w_out, u_out)
    })
}

#[no_mangle]
pub unsafe extern "C" fn rs_double_null_point(
    channel: *const RsChannel,
    p_r: f64,
    alpha: f64,
    unit: RsRateUnit,
    out: *mut RsRatePoint,
    w_out: *mut RsComplex,
    u_out: *mut RsComplex,
) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        let r = schemes::double_null_point(&link(ch), p_r, alpha, unit.into())?;
        finish_point(r, out, w_out, u_out)
    })
}

/// Time-division point: fraction `alpha` of the time serves D alone.
#[no_mangle]
pub unsafe extern "C" fn rs_tdma_point(
    channel: *const RsChannel,
    p_r: f64,
    alpha: f64,
    unit: RsRateUnit,
    out: *mut RsRatePoint,
) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        let p = schemes::tdma_point(&link(ch), p_r, alpha, unit.into())?;
        write_out(out, p.into(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn rs_outer_bound_point(
    channel: *const RsChannel,
    p_r: f64,
    alpha: f64,
    unit: RsRateUnit,
    out: *mut RsRatePoint,
) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        let p = schemes::outer_bound_point(&link(ch), p_r, alpha, unit.into())?;
        write_out(out, p.into(), "out")
    })
}

/// Sample `scheme` on a uniform grid of `alpha_points` power splits.
#[no_mangle]
pub unsafe extern "C" fn rs_region_new(
    channel: *const RsChannel,
    scheme: RsScheme,
    p_r: f64,
    alpha_points: usize,
    unit: RsRateUnit,
    out: *mut *mut RsRegion,
) -> RsStatus {
    guard(|| {
        let ch = deref(channel, "channel")?;
        let grid = schemes::uniform_alpha_grid(alpha_points)?;
        let region = schemes::build_region(scheme.into(), &link(ch), p_r, &grid, unit.into())?;
        write_out(out, Box::into_raw(Box::new(RsRegion(region))), "out")
    })
}

/// Clip the region in place to `r_d + r_e <= c1`.
#[no_mangle]
pub unsafe extern "C" fn rs_region_apply_first_hop_cap(region: *mut RsRegion, c1: f64) -> RsStatus {
    guard(|| {
        let r = region.as_mut().ok_or_else(|| null("region"))?;
        r.0 = schemes::apply_first_hop_cap(&r.0, c1)?;
        Ok(())
    })
}

/// Number of samples, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn rs_region_len(region: *const RsRegion) -> usize {
    region.as_ref().map_or(0, |r| r.0.samples.len())
}

#[no_mangle]
pub unsafe extern "C" fn rs_region_sample(region: *const RsRegion, index: usize, out: *mut RsRegionSample) -> RsStatus {
    guard(|| {
        let r = &deref(region, "region")?.0;
        let s = r.samples.get(index).ok_or_else(|| {
            Failure(
                RsStatus::OutOfRange,
                format!("index {index} out of range for {} samples", r.samples.len()),
            )
        })?;
        let sample = RsRegionSample {
            alpha: s.alpha,
            r_d: s.point.r_d,
            r_e: s.point.r_e,
            on_frontier: r.is_on_frontier(index),
            has_protected: s.protected.is_some(),
            protected_: match s.protected {
                Some(Protected::D) => RsProtected::D,
                _ => RsProtected::E,
            },
        };
        write_out(out, sample, "out")
    })
}

/// Render as CSV (same layout as the command-line tool); free the result
/// with [`rs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rs_region_to_csv(
    region: *const RsRegion,
    convex_hull: bool,
    out: *mut *mut c_char,
) -> RsStatus {
    guard(|| {
        let r = deref(region, "region")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(schemes::region_csv(std::slice::from_ref(&r.0), convex_hull))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn rs_region_write_csv(
    region: *const RsRegion,
    path: *const c_char,
    convex_hull: bool,
) -> RsStatus {
    guard(|| {
        let r = deref(region, "region")?;
        let path = read_str(path, "path")?;
        let csv = schemes::region_csv(std::slice::from_ref(&r.0), convex_hull);
        std::fs::write(Path::new(path), csv).map_err(|e| Failure::from(Error::from(e)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn rs_region_free(region: *mut RsRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}
