//! Exact real arithmetic, semi-decisions and certified coverings of compact sets.

#[cfg(feature = "cli")]
pub mod cli;
pub mod dyadic;
pub mod error;
pub mod fractal;
pub mod hyper;
pub mod interval;
pub mod kernel;
pub mod real;
pub mod render;
pub mod space;
pub mod tbound;

pub use dyadic::Dyadic;
pub use error::{EffortExhausted, ParseError, SetError};
pub use interval::Interval;
pub use kernel::{Effort, Kleenean, Side, Sierpinski, Tri};
pub use real::CReal;
pub use space::{max_norm_dist, MetricSpace, Point};
pub use tbound::{TBSet, Node, Cover};
pub use fractal::{ifs_limit_tb, ifs_tb, sierpinski_tb, triangle_tb, Ifs};
