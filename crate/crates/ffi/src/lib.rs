//! C ABI over `rankwatch`.
//!
//! Handles are opaque and owned by the caller once returned; free them with
//! the matching `*_free`. Every fallible call returns an [`RwStatus`]. On
//! failure a message is kept per thread and can be read with
//! [`rw_last_error_message`]. Objects and ranks are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rankwatch::analysis::{classify_game, Regime};
use rankwatch::baselines::{make_baseline, BaselineKind};
use rankwatch::nw2::{LearnerConfig, Nw2Learner};
use rankwatch::sim::{Learner, LearnerKind};
use rankwatch::{build_game, Error, GameSpec, MeasureSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Runtime = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RwMeasure {
    Pl = 0,
    Sl = 1,
    Dcg = 2,
    Pn = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RwRegime {
    Trivial = 0,
    Easy = 1,
    Hard = 2,
    Hopeless = 3,
}

/// Explicit game: rankings in lexicographic order, outcomes as bit indices.
pub struct RwGame {
    inner: GameSpec,
}

/// Online learner chosen for the measure and feedback depth.
pub struct RwLearner {
    inner: Box<dyn Learner + Send>,
    m: usize,
    k: usize,
    pending: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> RwStatus {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Convergence { .. } => RwStatus::Runtime,
        Error::ActionIndex { .. } | Error::OutcomeIndex { .. } => RwStatus::OutOfRange,
        _ => RwStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<(), (RwStatus, String)>>(f: F) -> RwStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RwStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (RwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (RwStatus, String) {
    (RwStatus::NullPointer, format!("{what} is null"))
}

fn measure_spec(measure: RwMeasure, n: usize) -> MeasureSpec {
    match measure {
        RwMeasure::Pl => MeasureSpec::pl(),
        RwMeasure::Sl => MeasureSpec::sl(),
        RwMeasure::Dcg => MeasureSpec::dcg(),
        RwMeasure::Pn => MeasureSpec::pn(n),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rw_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Builds the explicit game. `n` is read only for `RW_MEASURE_PN`.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn rw_game_new(
    measure: RwMeasure,
    n: usize,
    m: usize,
    k: usize,
    out: *mut *mut RwGame,
) -> RwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let game = build_game(measure_spec(measure, n), m, k).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(RwGame { inner: game }));
        Ok(())
    })
}

/// # Safety
/// `game` must be null or a handle from [`rw_game_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rw_game_free(game: *mut RwGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// # Safety
/// `game` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rw_game_shape(
    game: *const RwGame,
    actions: *mut usize,
    outcomes: *mut usize,
    symbols: *mut usize,
) -> RwStatus {
    guard(|| {
        let g = game.as_ref().ok_or_else(|| null("game"))?;
        if actions.is_null() || outcomes.is_null() || symbols.is_null() {
            return Err(null("output"));
        }
        *actions = g.inner.num_actions();
        *outcomes = g.inner.num_outcomes();
        *symbols = g.inner.num_symbols();
        Ok(())
    })
}

fn check_cell(g: &GameSpec, action: usize, outcome: usize) -> Result<(), (RwStatus, String)> {
    g.check_action(action).map_err(lib_err)?;
    if outcome >= g.num_outcomes() {
        return Err(lib_err(Error::OutcomeIndex { m: g.m, index: outcome }));
    }
    Ok(())
}

/// Loss of ranking `action` under outcome `outcome`, as a double.
///
/// # Safety
/// `game` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rw_game_loss(game: *const RwGame, action: usize, outcome: usize, out: *mut f64) -> RwStatus {
    guard(|| {
        let g = game.as_ref().ok_or_else(|| null("game"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        check_cell(&g.inner, action, outcome)?;
        *out = g.inner.loss.get_f64(action, outcome);
        Ok(())
    })
}

/// Feedback symbol index for `action` under `outcome`.
///
/// # Safety
/// `game` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rw_game_feedback(
    game: *const RwGame,
    action: usize,
    outcome: usize,
    out: *mut usize,
) -> RwStatus {
    guard(|| {
        let g = game.as_ref().ok_or_else(|| null("game"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        check_cell(&g.inner, action, outcome)?;
        *out = g.inner.feedback.symbol(action, outcome);
        Ok(())
    })
}

/// Writes ranking `action` (objects by rank) into `buf`, which must hold `m` entries.
///
/// # Safety
/// `game` must be a live handle and `buf` valid for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn rw_game_action(game: *const RwGame, action: usize, buf: *mut usize, len: usize) -> RwStatus {
    guard(|| {
        let g = game.as_ref().ok_or_else(|| null("game"))?;
        g.inner.check_action(action).map_err(lib_err)?;
        write_ranking(g.inner.actions[action].rank_to_object(), buf, len)
    })
}

/// Observability regime of the game.
///
/// # Safety
/// `game` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rw_game_classify(game: *const RwGame, out: *mut RwRegime) -> RwStatus {
    guard(|| {
        let g = game.as_ref().ok_or_else(|| null("game"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match classify_game(&g.inner).map_err(lib_err)? {
            Regime::Trivial => RwRegime::Trivial,
            Regime::Easy => RwRegime::Easy,
            Regime::Hard => RwRegime::Hard,
            Regime::Hopeless => RwRegime::Hopeless,
        };
        Ok(())
    })
}

unsafe fn write_ranking(objects: &[usize], buf: *mut usize, len: usize) -> Result<(), (RwStatus, String)> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    if len < objects.len() {
        return Err((
            RwStatus::BufferTooSmall,
            format!("buffer holds {len} entries, ranking has {}", objects.len()),
        ));
    }
    ptr::copy_nonoverlapping(objects.as_ptr(), buf, objects.len());
    Ok(())
}

/// Creates the default learner for the setting: NW2 for precision@n with
/// top-1 feedback, follow-the-leader when `k == m`, explore-then-commit
/// otherwise.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn rw_learner_new(
    measure: RwMeasure,
    n: usize,
    m: usize,
    k: usize,
    horizon: usize,
    seed: u64,
    out: *mut *mut RwLearner,
) -> RwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if horizon == 0 {
            return Err((RwStatus::InvalidArgument, "horizon must be positive".into()));
        }
        let spec = measure_spec(measure, n);
        spec.validate(m).map_err(lib_err)?;
        if k == 0 || k > m {
            return Err(lib_err(Error::InvalidDepth { m, k }));
        }
        let inner: Box<dyn Learner + Send> = match LearnerKind::default_for(spec, m, k) {
            LearnerKind::Nw2 => Box::new(Nw2Learner::new(&LearnerConfig::new(m, n, horizon, seed)).map_err(lib_err)?),
            LearnerKind::FullInfoFtl => {
                make_baseline(BaselineKind::FullInfoFtl, spec, m, k, horizon, None).map_err(lib_err)?
            }
            LearnerKind::ExploreExploit => {
                make_baseline(BaselineKind::ExploreExploit, spec, m, k, horizon, None).map_err(lib_err)?
            }
        };
        *out = Box::into_raw(Box::new(RwLearner {
            inner,
            m,
            k,
            pending: false,
        }));
        Ok(())
    })
}

/// # Safety
/// `learner` must be null or a handle from [`rw_learner_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rw_learner_free(learner: *mut RwLearner) {
    if !learner.is_null() {
        drop(Box::from_raw(learner));
    }
}

/// Picks the next ranking and writes its objects by rank into `buf`.
///
/// # Safety
/// `learner` must be a live handle and `buf` valid for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn rw_learner_select(learner: *mut RwLearner, buf: *mut usize, len: usize) -> RwStatus {
    guard(|| {
        let l = learner.as_mut().ok_or_else(|| null("learner"))?;
        if l.pending {
            return Err((RwStatus::InvalidArgument, "select called twice without observe".into()));
        }
        if len < l.m {
            return Err((RwStatus::BufferTooSmall, format!("buffer holds {len} entries, need {}", l.m)));
        }
        let sel = l.inner.select().map_err(lib_err)?;
        write_ranking(sel.ranking.rank_to_object(), buf, len)?;
        l.pending = true;
        Ok(())
    })
}

/// Feeds back the relevances of the top `k` ranked objects (0 or 1 each).
///
/// # Safety
/// `learner` must be a live handle and `bits` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rw_learner_observe(learner: *mut RwLearner, bits: *const u8, len: usize) -> RwStatus {
    guard(|| {
        let l = learner.as_mut().ok_or_else(|| null("learner"))?;
        if bits.is_null() {
            return Err(null("bits"));
        }
        if !l.pending {
            return Err((RwStatus::InvalidArgument, "observe called before select".into()));
        }
        if len != l.k {
            return Err((RwStatus::InvalidArgument, format!("expected {} feedback bits, got {len}", l.k)));
        }
        let fb = std::slice::from_raw_parts(bits, len);
        if let Some(&b) = fb.iter().find(|&&b| b > 1) {
            return Err(lib_err(Error::InvalidRelevance(b)));
        }
        l.inner.observe(fb).map_err(lib_err)?;
        l.pending = false;
        Ok(())
    })
}
