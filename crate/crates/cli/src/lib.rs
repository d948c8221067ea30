//! HTTP answer API shared by the `serve` and `play` commands.

pub mod api;
