//! mdbook cannot run snippets that need workspace crates, so each chapter of
//! the guide is a module here and `cargo test --doc` runs its code blocks.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/kloosterman.md")]
pub mod kloosterman {}
#[doc = include_str!("../../../book/src/bessel.md")]
pub mod bessel {}
#[doc = include_str!("../../../book/src/eigenforms.md")]
pub mod eigenforms {}
#[doc = include_str!("../../../book/src/petersson.md")]
pub mod petersson {}
#[doc = include_str!("../../../book/src/density.md")]
pub mod density {}
#[doc = include_str!("../../../book/src/rmt.md")]
pub mod rmt {}
#[doc = include_str!("../../../book/src/extremal.md")]
pub mod extremal {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/acceptance.md")]
pub mod acceptance {}
