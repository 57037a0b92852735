//! Compiles and runs the Rust snippets of the guide in `book/src`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}

#[doc = include_str!("../../../book/src/execution.md")]
pub mod execution {}

#[doc = include_str!("../../../book/src/bounds.md")]
pub mod bounds {}

#[doc = include_str!("../../../book/src/transformer.md")]
pub mod transformer {}

#[doc = include_str!("../../../book/src/worstcase.md")]
pub mod worstcase {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
