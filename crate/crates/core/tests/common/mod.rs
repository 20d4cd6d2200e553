#![allow(dead_code)]

pub mod known;
pub mod oracle;
