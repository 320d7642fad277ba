//! Real-interval arithmetic for computing correctly rounded ground-truth
//! values of floating-point expressions.
//!
//! Intervals carry an error interval recording possible domain errors and a
//! movability flag per endpoint, which together let the evaluator tell when
//! more precision cannot help. On top of evaluation sits an input search
//! that samples valid inputs uniformly.

pub mod backend;
pub mod eval;
pub mod expr;
pub mod fpcore;
pub mod interval;
pub mod ops;
pub mod sample;
pub mod search;
pub mod target;

pub use backend::{Backend, BackendError, BigFloat, ExpKind, RoundDir, Rounded, ScalarOp};
pub use ops::{CompareOp, Ctx};
pub use interval::{BoolInterval, Endpoint, ErrorInterval, Interval, NamedConstant, Value};
pub use target::TargetFormat;
pub use eval::{Engine, InvalidReason, Ladder, Outcome, Summary};
pub use expr::{Expr, Program};
pub use fpcore::{parse_program, parse_programs, ParseError};
pub use sample::{sample, Sample, SampleConfig, SampleError, SampleStats};
pub use search::{search, Rect, SearchConfig, SearchState, StuckPolicy};
