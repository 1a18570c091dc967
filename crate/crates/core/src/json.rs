//! JSON emission with fixed 17-significant-digit floats.
//!
//! `serde_json` prints the shortest round-tripping representation, which is
//! lossless but variable width. Files written by this crate always carry
//! 17 significant digits so that readers in other languages parse back the
//! exact same doubles.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::Result;

/// Wraps another formatter and overrides float output.
struct FullPrecision<F>(F);

fn write_full<W: ?Sized + io::Write>(writer: &mut W, value: f64) -> io::Result<()> {
    // `{:.16e}` is one leading digit plus 16 fractional digits.
    write!(writer, "{value:.16e}")
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl<F: Formatter> Formatter for FullPrecision<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write_full(writer, value)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write_full(writer, value as f64)
    }

    forward!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        Serializer::with_formatter(&mut buf, FullPrecision(serde_json::ser::CompactFormatter));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
}

/// Same as [`to_string`], indented.
pub fn to_string_pretty<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
}

/// Formats `x` with `digits` significant digits for human-readable tables.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=12).contains(&exp) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}
