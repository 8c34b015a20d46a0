pub mod error;
pub mod forms;
pub mod fptengine;
pub mod genericfpt;
pub mod gfpoly;
pub mod ratbase;
pub mod strata;

pub use error::{Error, Result};

/// Version stamped on every serialized report.
pub const SCHEMA_VERSION: u32 = 1;

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/truncations.md")]
    mod truncations {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/thresholds.md")]
    mod thresholds {}
    #[doc = include_str!("../../../book/src/generic.md")]
    mod generic {}
    #[doc = include_str!("../../../book/src/strata.md")]
    mod strata {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
