//! The guide's code snippets double as doc-tests: `cargo test --doc` runs
//! every ```rust block in `book/src`.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/geometry.md")]
mod geometry {}
#[doc = include_str!("../../../book/src/models.md")]
mod models {}
#[doc = include_str!("../../../book/src/sampling.md")]
mod sampling {}
#[doc = include_str!("../../../book/src/couplings.md")]
mod couplings {}
#[doc = include_str!("../../../book/src/diagnostics.md")]
mod diagnostics {}
#[doc = include_str!("../../../book/src/estimation.md")]
mod estimation {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
