//! RFC-4180 record splitter.
//!
//! The `csv` crate drops blank lines, but a blank line in a single-column
//! file is a record holding one empty (missing) cell, so records are split
//! here instead.

use crate::error::{HnetError, Result};

pub(crate) fn split_records(text: &str, delimiter: char) -> Result<Vec<Vec<String>>> {
    let mut records = Vec::new();
    let mut record: Vec<String> = Vec::new();
    let mut field = String::new();
    let mut chars = text.chars().peekable();
    let mut line = 1usize;
    // true once anything (even an empty field) belongs to the current record
    let mut pending = false;

    while let Some(c) = chars.next() {
        match c {
            '"' if field.is_empty() => {
                pending = true;
                loop {
                    match chars.next() {
                        Some('"') => {
                            if chars.peek() == Some(&'"') {
                                chars.next();
                                field.push('"');
                            } else {
                                break;
                            }
                        }
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            field.push(ch);
                        }
                        None => {
                            return Err(HnetError::MalformedCsv(format!(
                                "unterminated quoted field at line {line}"
                            )))
                        }
                    }
                }
                match chars.peek() {
                    None | Some('\n') | Some('\r') => {}
                    Some(&d) if d == delimiter => {}
                    Some(other) => {
                        return Err(HnetError::MalformedCsv(format!(
                            "unexpected `{other}` after closing quote at line {line}"
                        )))
                    }
                }
            }
            c if c == delimiter => {
                record.push(std::mem::take(&mut field));
                pending = true;
            }
            '\r' | '\n' => {
                if c == '\r' && chars.peek() == Some(&'\n') {
                    chars.next();
                }
                record.push(std::mem::take(&mut field));
                records.push(std::mem::take(&mut record));
                pending = false;
                line += 1;
            }
            other => {
                field.push(other);
                pending = true;
            }
        }
    }
    if pending {
        record.push(field);
        records.push(record);
    }
    Ok(records)
}
