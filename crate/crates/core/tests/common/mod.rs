#![allow(dead_code)]

pub mod conformance;
pub mod corpus;
pub mod oracle;
pub mod planted;
pub mod scoring;
