//! File formats, instance generators, the benchmark runner and the `moco`
//! command line built on `moco-core`.

pub mod bench;
pub mod cli;
pub mod gen;
pub mod opb;
pub mod report;

pub use bench::{run_instances, BenchInstance, RunOptions, RunReport, SuiteReport, CSV_HEADER};
pub use gen::{gen_random_pb, gen_set_cover};
pub use opb::{parse_mo_opb, render_mo_opb, OpbError};
pub use report::FrontDocument;
