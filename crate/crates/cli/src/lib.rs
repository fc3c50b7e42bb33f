//! Stream front end for the `dyn-densest` maintainers.

pub mod run;
pub mod stream;

pub use run::{run, Answer, Metrics, RunError, RunMode, RunOptions, RunReport};
pub use stream::{parse_stream, EventKind, ParseError, Stream, UpdateEvent};
