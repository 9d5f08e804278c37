//! Coverage-analysis question generation.
//!
//! Snippets in a small Python-style language are parsed ([`minilang`]),
//! turned into control-flow graphs with minimum test-case counts per
//! coverage method ([`flowgraph`]), stored in an item bank ([`bank`]), and
//! combined into multiple-choice questions ([`qgen`]) that are rendered and
//! exported as spreadsheet-ready CSV ([`render_export`]). Responses to an
//! administered exam are analyzed in [`psychometrics`].

pub mod atomic;
pub mod bank;
pub mod cli;
pub mod flowgraph;
pub mod minilang;
pub mod psychometrics;
pub mod qgen;
pub mod render_export;
