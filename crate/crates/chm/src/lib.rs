//! Standard-library companion to `chm-core`: CSV/JSON formats, seeded
//! instance generators, an exact rational membership oracle, Wolfe's
//! min-norm-point routine, benchmark suites and the `chm` command line.

pub mod bench;
pub mod certify;
pub mod exact;
pub mod generate;
pub mod io;
pub mod nearest;

pub use exact::{exact_oracle, ExactVerdict};
pub use generate::{gen_chm_instance, gen_lp_instance, gen_strict_lp_instance, gen_vertex_instance, GenSpec, Kind};
