//! Text channel files.
//!
//! ```text
//! # binary symmetric channel
//! dmc 1 2 2
//! 0.9 0.1
//! 0.1 0.9
//! ```
//!
//! The header is `dmc K |X_1| ... |X_K| |Y|`; then one row of `|Y|`
//! probabilities per input tuple, tuples in lexicographic order with the
//! last user's symbol varying fastest. `#` starts a comment.

use std::io::Read;

use raxcode_core::channel::{MAX_USERS, SUM_TOLERANCE};
use raxcode_core::Channel;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: row {row} sums to {sum}, not 1")]
    RowSum { line: usize, row: usize, sum: f64 },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("empty channel file")]
    Empty,
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] raxcode_core::Error),
}

fn syntax(line: usize, msg: impl Into<String>) -> ChannelFileError {
    ChannelFileError::Syntax { line, msg: msg.into() }
}

pub fn parse_channel(text: &str) -> Result<Channel, ChannelFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(ChannelFileError::Empty)?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("dmc") {
        return Err(syntax(hline, "header must start with `dmc`"));
    }
    let mut dims = Vec::new();
    for t in tok {
        let d: usize = t.parse().map_err(|_| syntax(hline, format!("bad dimension `{t}`")))?;
        if d == 0 {
            return Err(syntax(hline, "dimensions must be positive"));
        }
        dims.push(d);
    }
    let users = *dims.first().ok_or_else(|| syntax(hline, "missing user count"))?;
    if users == 0 || users > MAX_USERS {
        return Err(syntax(hline, format!("user count must be between 1 and {MAX_USERS}")));
    }
    if dims.len() != users + 2 {
        return Err(syntax(
            hline,
            format!("expected {} alphabet sizes after the user count, found {}", users + 1, dims.len() - 1),
        ));
    }
    let inputs = dims[1..=users].to_vec();
    let ny = dims[users + 1];
    let rows = inputs
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| syntax(hline, "input alphabet too large"))?;

    let mut transition = Vec::with_capacity(rows.saturating_mul(ny));
    let mut found = 0;
    for (line, body) in lines {
        if found == rows {
            return Err(syntax(line, format!("extra row beyond the {rows} input tuples")));
        }
        let mut sum = 0.0;
        let mut count = 0;
        for t in body.split_whitespace() {
            let p: f64 = t
                .parse()
                .map_err(|_| syntax(line, format!("row {found}: bad number `{t}`")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(syntax(line, format!("row {found}: {p} is not a probability")));
            }
            sum += p;
            count += 1;
            transition.push(p);
        }
        if count != ny {
            return Err(syntax(line, format!("row {found}: expected {ny} entries, found {count}")));
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(ChannelFileError::RowSum { line, row: found, sum });
        }
        found += 1;
    }
    if found != rows {
        return Err(ChannelFileError::RowCount { expected: rows, found });
    }
    Ok(Channel::new(inputs, ny, transition)?)
}

pub fn load_channel<R: Read>(mut source: R) -> Result<Channel, ChannelFileError> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| ChannelFileError::Io(e.to_string()))?;
    parse_channel(&text)
}

/// Channel file text for `ch`, readable by [`parse_channel`].
pub fn write_channel(ch: &Channel) -> String {
    let mut out = format!("dmc {}", ch.num_users());
    for d in ch.input_sizes() {
        out.push_str(&format!(" {d}"));
    }
    out.push_str(&format!(" {}\n", ch.output_size()));
    for r in 0..ch.num_rows() {
        let row: Vec<String> = ch.row(r).iter().map(|p| format!("{p:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
