//! Littlewood–Paley square functions, time-frequency tiles, dyadic Carleson
//! machinery and q-variation multipliers on the discrete torus `Z_n`.

pub mod carleson;
pub mod error;
pub mod greedy;
pub mod fit;
pub mod grid;
pub mod io;
pub mod maximal;
pub mod multiplier;
pub mod product_carleson;
pub mod projections;
pub mod rng;
pub mod signal2;
pub mod sweep;
pub mod tail;
pub mod tiles;
pub mod tiles2d;
pub mod variation;
pub mod well;
pub mod window;

pub use error::{LabError, Result};
pub use grid::{
    dft, idft, lp_norm, symmetry, DyadicInterval, FreqInterval, IntervalCollection, Spectrum, Symmetry, TorusSignal, C64,
};
pub use carleson::CarlesonSeq;
pub use multiplier::{apply_multiplier, op_norm_p, Multiplier, NormConfig, NormEstimate};
pub use product_carleson::{DyadicRect, ProductCarlesonSeq};
pub use signal2::{FreqRect, Signal2};
pub use tiles::{build_tiles, Tile, TileFamily, TileSet};
pub use variation::{var_q, vq_norm, StepMultiplier};
pub use window::{make_window, Window};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
