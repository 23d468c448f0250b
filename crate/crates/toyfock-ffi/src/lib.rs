//! C ABI for the toyfock library.
//!
//! Values cross the boundary either as opaque handles (`ToyfockChaos`,
//! `ToyfockWord`, `ToyfockMatrix`) or as NUL-terminated strings in the same
//! text formats the CLI uses. Every fallible function returns a
//! [`ToyfockStatus`]; on failure the message is retrievable through
//! [`toyfock_last_error`]. Strings returned through out-parameters are owned
//! by the caller and must be released with [`toyfock_string_free`]; handles
//! with their `_free` functions. Passing a null pointer where a value is
//! required yields `NullPointer`, never undefined behavior.
//!
//! Safety contract, uniform across all `unsafe` functions here: string
//! arguments must be valid NUL-terminated buffers, handle arguments must be
//! live values produced by this library and not freed, and out-pointers
//! must be writable.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use toyfock::chaos::{from_atoms, to_atoms, AtomVector, ChaosElement};
use toyfock::matrep::{word_to_matrix, DyadicMatrix};
use toyfock::operators::expr::OperatorExpr;
use toyfock::rigged::{distance_to_stratum, dual_pair, nq_core, ProjectiveVector, RiggedVector};
use toyfock::signed::{embed, verify_embedding, EmbedSpec, SignedWord};
use toyfock::verify::run_suite;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ToyfockStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Text input did not match the expected format.
    ParseError = 3,
    /// Arguments outside an operation's domain.
    DomainError = 4,
    /// A verification campaign reported failures.
    VerificationFailed = 5,
    /// Unexpected internal failure.
    InternalError = 6,
}

/// Opaque Walsh series handle.
pub struct ToyfockChaos(ChaosElement);

/// Opaque signed-word handle.
pub struct ToyfockWord(SignedWord);

/// Opaque dyadic-matrix handle.
pub struct ToyfockMatrix(DyadicMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &toyfock::Error) -> ToyfockStatus {
    match err {
        toyfock::Error::Parse { .. } => ToyfockStatus::ParseError,
        toyfock::Error::InvariantViolation(_) => ToyfockStatus::InternalError,
        _ => ToyfockStatus::DomainError,
    }
}

fn fail(err: &toyfock::Error) -> ToyfockStatus {
    set_error(err.to_string());
    status_of(err)
}

/// Run a closure, translating panics into `InternalError`.
fn guarded(f: impl FnOnce() -> ToyfockStatus) -> ToyfockStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".into());
            ToyfockStatus::InternalError
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, ToyfockStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(ToyfockStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".into());
        ToyfockStatus::InvalidUtf8
    })
}

unsafe fn read_handle<'a, T>(ptr: *const T) -> Result<&'a T, ToyfockStatus> {
    if ptr.is_null() {
        set_error("null handle argument".into());
        Err(ToyfockStatus::NullPointer)
    } else {
        Ok(&*ptr)
    }
}

fn write_out<T>(out: *mut T, value: T) -> ToyfockStatus {
    if out.is_null() {
        set_error("null output pointer".into());
        return ToyfockStatus::NullPointer;
    }
    unsafe { out.write(value) };
    ToyfockStatus::Ok
}

fn write_string(out: *mut *mut c_char, text: String) -> ToyfockStatus {
    match CString::new(text) {
        Ok(c) => write_out(out, c.into_raw()),
        Err(_) => {
            set_error("output contained an interior NUL".into());
            ToyfockStatus::InternalError
        }
    }
}

/// Latest error message as a caller-owned string, or null if none.
#[no_mangle]
pub extern "C" fn toyfock_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn toyfock_string_free(ptr: *mut c_char) {
    if !ptr.is_null() {
        drop(CString::from_raw(ptr));
    }
}

// ---------------------------------------------------------------------------
// Chaos elements
// ---------------------------------------------------------------------------

/// Parse a chaos element from the text format (one `<mask> <num>/<den>` term
/// per line).
#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_parse(
    text: *const c_char,
    out: *mut *mut ToyfockChaos,
) -> ToyfockStatus {
    guarded(|| {
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ChaosElement::parse(text) {
            Ok(f) => write_out(out, Box::into_raw(Box::new(ToyfockChaos(f)))),
            Err(e) => fail(&e),
        }
    })
}

/// Render a chaos element in the text format.
#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_render(
    handle: *const ToyfockChaos,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let f = match read_handle(handle) {
            Ok(f) => f,
            Err(s) => return s,
        };
        write_string(out, f.0.render())
    })
}

#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_free(handle: *mut ToyfockChaos) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Walsh (xor-convolution) product.
#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_mul(
    a: *const ToyfockChaos,
    b: *const ToyfockChaos,
    out: *mut *mut ToyfockChaos,
) -> ToyfockStatus {
    guarded(|| {
        let (a, b) = match (read_handle(a), read_handle(b)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        write_out(out, Box::into_raw(Box::new(ToyfockChaos(&a.0 * &b.0))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_add(
    a: *const ToyfockChaos,
    b: *const ToyfockChaos,
    out: *mut *mut ToyfockChaos,
) -> ToyfockStatus {
    guarded(|| {
        let (a, b) = match (read_handle(a), read_handle(b)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        write_out(out, Box::into_raw(Box::new(ToyfockChaos(&a.0 + &b.0))))
    })
}

/// Inner product `<a, b>` as a `num/den` string.
#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_inner(
    a: *const ToyfockChaos,
    b: *const ToyfockChaos,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let (a, b) = match (read_handle(a), read_handle(b)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let value = a.0.inner(&b.0);
        write_string(out, format!("{}/{}", value.numer(), value.denom()))
    })
}

/// Expectation (coefficient at the empty mask) as a `num/den` string.
#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_expectation(
    handle: *const ToyfockChaos,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let f = match read_handle(handle) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let value = f.0.expectation();
        write_string(out, format!("{}/{}", value.numer(), value.denom()))
    })
}

/// Apply an operator expression (`N@1`, `D^101`, `cN^d{c=..,d=..}`, composed
/// with `.`) to a chaos element.
#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_apply(
    expr: *const c_char,
    input: *const ToyfockChaos,
    out: *mut *mut ToyfockChaos,
) -> ToyfockStatus {
    guarded(|| {
        let expr = match read_str(expr) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let f = match read_handle(input) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let parsed = match OperatorExpr::parse(expr) {
            Ok(p) => p,
            Err(e) => return fail(&e),
        };
        match parsed.apply(&f.0) {
            Ok(result) => write_out(out, Box::into_raw(Box::new(ToyfockChaos(result)))),
            Err(e) => fail(&e),
        }
    })
}

/// Forward transform: atom values at depth `n`, one rational per line.
#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_to_atoms(
    handle: *const ToyfockChaos,
    depth: u32,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let f = match read_handle(handle) {
            Ok(f) => f,
            Err(s) => return s,
        };
        match to_atoms(&f.0, depth) {
            Ok(atoms) => write_string(out, atoms.render()),
            Err(e) => fail(&e),
        }
    })
}

/// Inverse transform from atom values (power-of-two many lines).
#[no_mangle]
pub unsafe extern "C" fn toyfock_chaos_from_atoms(
    text: *const c_char,
    out: *mut *mut ToyfockChaos,
) -> ToyfockStatus {
    guarded(|| {
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match AtomVector::parse(text) {
            Ok(atoms) => write_out(
                out,
                Box::into_raw(Box::new(ToyfockChaos(from_atoms(&atoms)))),
            ),
            Err(e) => fail(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// Signed words
// ---------------------------------------------------------------------------

/// Parse a signed word from `[s;p]` notation, optional leading `-`.
#[no_mangle]
pub unsafe extern "C" fn toyfock_word_parse(
    text: *const c_char,
    out: *mut *mut ToyfockWord,
) -> ToyfockStatus {
    guarded(|| {
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match SignedWord::parse(text) {
            Ok(w) => write_out(out, Box::into_raw(Box::new(ToyfockWord(w)))),
            Err(e) => fail(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn toyfock_word_render(
    handle: *const ToyfockWord,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let w = match read_handle(handle) {
            Ok(w) => w,
            Err(s) => return s,
        };
        write_string(out, w.0.render())
    })
}

#[no_mangle]
pub unsafe extern "C" fn toyfock_word_free(handle: *mut ToyfockWord) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Group product with the sign twist.
#[no_mangle]
pub unsafe extern "C" fn toyfock_word_mul(
    a: *const ToyfockWord,
    b: *const ToyfockWord,
    out: *mut *mut ToyfockWord,
) -> ToyfockStatus {
    guarded(|| {
        let (a, b) = match (read_handle(a), read_handle(b)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        write_out(out, Box::into_raw(Box::new(ToyfockWord(a.0.mul(&b.0)))))
    })
}

/// Signum: the sign of the word's square, `+1` or `-1`.
#[no_mangle]
pub unsafe extern "C" fn toyfock_word_sigma(
    handle: *const ToyfockWord,
    out: *mut i32,
) -> ToyfockStatus {
    guarded(|| {
        let w = match read_handle(handle) {
            Ok(w) => w,
            Err(s) => return s,
        };
        write_out(out, w.0.sigma().value() as i32)
    })
}

/// Commutativity function: `+1` if the words commute, `-1` if they
/// anticommute.
#[no_mangle]
pub unsafe extern "C" fn toyfock_word_comm(
    a: *const ToyfockWord,
    b: *const ToyfockWord,
    out: *mut i32,
) -> ToyfockStatus {
    guarded(|| {
        let (a, b) = match (read_handle(a), read_handle(b)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        write_out(out, a.0.comm(&b.0).value() as i32)
    })
}

/// Action of a word on a chaos element.
#[no_mangle]
pub unsafe extern "C" fn toyfock_word_apply(
    word: *const ToyfockWord,
    input: *const ToyfockChaos,
    out: *mut *mut ToyfockChaos,
) -> ToyfockStatus {
    guarded(|| {
        let (w, f) = match (read_handle(word), read_handle(input)) {
            (Ok(w), Ok(f)) => (w, f),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        write_out(out, Box::into_raw(Box::new(ToyfockChaos(w.0.apply(&f.0)))))
    })
}

/// Matrix of a word at the given depth (0 = the word's own depth).
#[no_mangle]
pub unsafe extern "C" fn toyfock_word_matrix(
    word: *const ToyfockWord,
    depth: u32,
    out: *mut *mut ToyfockMatrix,
) -> ToyfockStatus {
    guarded(|| {
        let w = match read_handle(word) {
            Ok(w) => w,
            Err(s) => return s,
        };
        let n = if depth == 0 { w.0.depth() } else { depth };
        match word_to_matrix(&w.0, n) {
            Ok(m) => write_out(out, Box::into_raw(Box::new(ToyfockMatrix(m)))),
            Err(e) => fail(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// Matrices and the rigged system
// ---------------------------------------------------------------------------

/// Parse a matrix from tab-separated rows (entries `a`, `a+bi`, `-bi`).
#[no_mangle]
pub unsafe extern "C" fn toyfock_matrix_parse(
    text: *const c_char,
    out: *mut *mut ToyfockMatrix,
) -> ToyfockStatus {
    guarded(|| {
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match DyadicMatrix::parse(text) {
            Ok(m) => write_out(out, Box::into_raw(Box::new(ToyfockMatrix(m)))),
            Err(e) => fail(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn toyfock_matrix_render(
    handle: *const ToyfockMatrix,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let m = match read_handle(handle) {
            Ok(m) => m,
            Err(s) => return s,
        };
        write_string(out, m.0.render())
    })
}

#[no_mangle]
pub unsafe extern "C" fn toyfock_matrix_free(handle: *mut ToyfockMatrix) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Strip principal quadruplings; returns the core and the strip count.
#[no_mangle]
pub unsafe extern "C" fn toyfock_matrix_nq_core(
    handle: *const ToyfockMatrix,
    out_core: *mut *mut ToyfockMatrix,
    out_strips: *mut u32,
) -> ToyfockStatus {
    guarded(|| {
        let m = match read_handle(handle) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let (core, strips) = nq_core(&m.0);
        let status = write_out(out_strips, strips);
        if status != ToyfockStatus::Ok {
            return status;
        }
        write_out(out_core, Box::into_raw(Box::new(ToyfockMatrix(core))))
    })
}

/// Squared distance to the depth-`stratum` stratum, as `num/den`.
#[no_mangle]
pub unsafe extern "C" fn toyfock_matrix_distance(
    handle: *const ToyfockMatrix,
    stratum: u32,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let m = match read_handle(handle) {
            Ok(m) => m,
            Err(s) => return s,
        };
        match distance_to_stratum(&m.0, stratum) {
            Ok(d) => write_string(out, format!("{}/{}", d.numer(), d.denom())),
            Err(e) => fail(&e),
        }
    })
}

/// Duality pairing of a projective top matrix with a rigged representative,
/// as `num/den`.
#[no_mangle]
pub unsafe extern "C" fn toyfock_matrix_pair(
    top: *const ToyfockMatrix,
    core: *const ToyfockMatrix,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let (top, core) = match (read_handle(top), read_handle(core)) {
            (Ok(t), Ok(c)) => (t, c),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let d = match ProjectiveVector::new(top.0.clone()) {
            Ok(d) => d,
            Err(e) => return fail(&e),
        };
        let v = match RiggedVector::new(core.0.clone()) {
            Ok(v) => v,
            Err(e) => return fail(&e),
        };
        match dual_pair(&d, &v) {
            Ok(value) => write_string(out, format!("{}/{}", value.numer(), value.denom())),
            Err(e) => fail(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// Embedding and verification
// ---------------------------------------------------------------------------

/// Realize a JSON embedding spec `{"signs":[...],"comm":[[...]]}`; the
/// output lists one word per line.
#[no_mangle]
pub unsafe extern "C" fn toyfock_embed_json(
    spec: *const c_char,
    out: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let text = match read_str(spec) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let spec = match EmbedSpec::from_json(text) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let words = match embed(&spec) {
            Ok(w) => w,
            Err(e) => return fail(&e),
        };
        match verify_embedding(&words, &spec) {
            Ok(check) if check.ok() => {}
            Ok(_) => {
                set_error("embedding verification failed".into());
                return ToyfockStatus::InternalError;
            }
            Err(e) => return fail(&e),
        }
        let mut text = String::new();
        for w in &words {
            text.push_str(&w.render());
            text.push('\n');
        }
        write_string(out, text)
    })
}

/// Run a verification suite; writes the text report and returns
/// `VerificationFailed` when the suite found counterexamples.
#[no_mangle]
pub unsafe extern "C" fn toyfock_verify(
    suite: *const c_char,
    seed: u64,
    count: u64,
    out_report: *mut *mut c_char,
) -> ToyfockStatus {
    guarded(|| {
        let suite = match read_str(suite) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match run_suite(suite, seed, count) {
            Ok(report) => {
                let passed = report.passed();
                let status = write_string(out_report, report.render_text());
                if status != ToyfockStatus::Ok {
                    status
                } else if passed {
                    ToyfockStatus::Ok
                } else {
                    set_error(format!("suite {suite} reported failures"));
                    ToyfockStatus::VerificationFailed
                }
            }
            Err(e) => fail(&e),
        }
    })
}
