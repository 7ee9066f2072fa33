//! The guide in `book/` as doctests: each chapter becomes a module so that
//! `cargo test` compiles and runs its code listings.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/infinitesimals.md")]
pub mod infinitesimals {}
#[doc = include_str!("../../../book/src/weil-algebras.md")]
pub mod weil_algebras {}
#[doc = include_str!("../../../book/src/expressions.md")]
pub mod expressions {}
#[doc = include_str!("../../../book/src/derivatives.md")]
pub mod derivatives {}
#[doc = include_str!("../../../book/src/taylor.md")]
pub mod taylor {}
#[doc = include_str!("../../../book/src/oracles.md")]
pub mod oracles {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
