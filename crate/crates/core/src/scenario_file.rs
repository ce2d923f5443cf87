//! Flat `key=value` scenario descriptions.
//!
//! ```text
//! # one unital channel, second interval noiseless
//! c1=0.8
//! c2=0.5
//! c3=0.3
//! s2=identity
//! theta_w=pi/4
//! rho=mixed
//! freeze=theta2:0
//! ```
//!
//! Keys: `c1..c3`, `b1..b3` (first channel, default identity), `s2` =
//! `identity` (default) or `same`, `s2_c1..s2_c3`/`s2_b1..s2_b3` for a
//! different second channel, `theta_w`, `phi_w`, `rho` = `mixed`,
//! `pure:<Λ>` or `bloch:<x>,<y>,<z>`, `freeze` = `<angle>:<value>[,...]`,
//! `starts`, `seed`. Numbers may be written with `pi`, e.g. `-3*pi/8`.

use std::collections::HashSet;
use std::f64::consts::PI;

use crate::bloch::{AffineChannel, BlochVector, RotationAngles};
use crate::engine::LgScenario;
use crate::error::{LgError, Result};
use crate::optimizer::{angle_index, MaximizeConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: LgScenario,
    pub frozen: Vec<(usize, f64)>,
    pub config: MaximizeConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SecondChannel {
    Identity,
    Same,
    Explicit,
}

fn parse_err(line: usize, field: &str, message: impl Into<String>) -> LgError {
    LgError::Parse {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

/// A product/quotient of numbers and `pi` with an optional sign.
pub fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty value".into());
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let mut value = 1.0;
    let mut divide = false;
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = rest[..end].trim();
        let factor = match token {
            "pi" | "π" => PI,
            "" => return Err(format!("malformed number `{text}`")),
            _ => token.parse::<f64>().map_err(|_| format!("`{token}` is not a number"))?,
        };
        if divide {
            value /= factor;
        } else {
            value *= factor;
        }
        if end == rest.len() {
            break;
        }
        divide = rest.as_bytes()[end] == b'/';
        rest = &rest[end + 1..];
    }
    let v = sign * value;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

fn parse_state(line: usize, value: &str) -> Result<BlochVector> {
    let num = |s: &str| parse_number(s).map_err(|m| parse_err(line, "rho", m));
    if value == "mixed" {
        return Ok(BlochVector::maximally_mixed());
    }
    if let Some(l) = value.strip_prefix("pure:") {
        return Ok(BlochVector::pure_xz(num(l)?));
    }
    if let Some(xyz) = value.strip_prefix("bloch:") {
        let parts: Vec<&str> = xyz.split(',').collect();
        if parts.len() != 3 {
            return Err(parse_err(line, "rho", "bloch needs three components"));
        }
        let w = [num(parts[0])?, num(parts[1])?, num(parts[2])?];
        return BlochVector::state(w).map_err(|e| parse_err(line, "rho", e.to_string()));
    }
    Err(parse_err(line, "rho", format!("expected mixed, pure:<angle> or bloch:<x>,<y>,<z>, got `{value}`")))
}

fn parse_freeze(line: usize, value: &str, out: &mut Vec<(usize, f64)>) -> Result<()> {
    for item in value.split(',') {
        let (name, v) = item
            .split_once(':')
            .ok_or_else(|| parse_err(line, "freeze", format!("expected <angle>:<value>, got `{item}`")))?;
        let idx = angle_index(name.trim())
            .ok_or_else(|| parse_err(line, "freeze", format!("unknown angle `{}`", name.trim())))?;
        let v = parse_number(v).map_err(|m| parse_err(line, "freeze", m))?;
        if out.iter().any(|(i, _)| *i == idx) {
            return Err(parse_err(line, "freeze", format!("`{}` frozen twice", name.trim())));
        }
        out.push((idx, v));
    }
    Ok(())
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let mut b = [0.0; 3];
    let mut c = [1.0; 3];
    let mut b2 = [0.0; 3];
    let mut c2 = [1.0; 3];
    let mut second = SecondChannel::Identity;
    let mut second_line = 0;
    let (mut theta_w, mut phi_w) = (0.0, 0.0);
    let mut rho = BlochVector::maximally_mixed();
    let mut frozen = Vec::new();
    let mut config = MaximizeConfig::default();
    let mut seen = HashSet::new();
    let mut channel_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, content, "expected key=value"))?;
        let (key, value) = (key.trim(), value.trim());
        if key != "freeze" && !seen.insert(key.to_string()) {
            return Err(parse_err(line, key, "duplicate key"));
        }
        let num = || parse_number(value).map_err(|m| parse_err(line, key, m));
        match key {
            "s2" => {
                second = match value {
                    "identity" => SecondChannel::Identity,
                    "same" => SecondChannel::Same,
                    _ => return Err(parse_err(line, key, format!("expected identity or same, got `{value}`"))),
                };
                second_line = line;
            }
            "theta_w" => theta_w = num()?,
            "phi_w" => phi_w = num()?,
            "rho" => rho = parse_state(line, value)?,
            "freeze" => parse_freeze(line, value, &mut frozen)?,
            "starts" => {
                config.n_starts = value
                    .parse()
                    .map_err(|_| parse_err(line, key, format!("`{value}` is not a count")))?
            }
            "seed" => {
                config.seed = value
                    .parse()
                    .map_err(|_| parse_err(line, key, format!("`{value}` is not an unsigned integer")))?
            }
            _ if key.starts_with("s2_") => {
                let k = &key[3..];
                if let Some(d) = slot_of(k, "c") {
                    c2[d - 1] = num()?;
                } else if let Some(d) = slot_of(k, "b") {
                    b2[d - 1] = num()?;
                } else {
                    return Err(parse_err(line, key, "unknown key"));
                }
                if second == SecondChannel::Same {
                    return Err(parse_err(line, key, "conflicts with s2=same"));
                }
                second = SecondChannel::Explicit;
                second_line = line;
            }
            _ => {
                if let Some(d) = slot_of(key, "c") {
                    c[d - 1] = num()?;
                } else if let Some(d) = slot_of(key, "b") {
                    b[d - 1] = num()?;
                } else {
                    return Err(parse_err(line, key, "unknown key"));
                }
                channel_line = line;
            }
        }
    }

    let s1 = AffineChannel::new(b, c);
    if !s1.is_valid() {
        return Err(parse_err(channel_line, "c", format!("b = {b:?}, c = {c:?} is not a valid channel")));
    }
    let s2 = match second {
        SecondChannel::Identity => AffineChannel::identity(),
        SecondChannel::Same => s1,
        SecondChannel::Explicit => {
            let ch = AffineChannel::new(b2, c2);
            if !ch.is_valid() {
                return Err(parse_err(second_line, "s2", format!("b = {b2:?}, c = {c2:?} is not a valid channel")));
            }
            ch
        }
    };
    config = config.with_frozen(frozen.clone());
    config.validate().map_err(|e| parse_err(0, "starts", e.to_string()))?;
    let scenario = LgScenario::new(s1, s2, RotationAngles::new(theta_w, phi_w), rho)?;
    Ok(ScenarioFile {
        scenario,
        frozen,
        config,
    })
}

fn slot_of(key: &str, prefix: &str) -> Option<usize> {
    key.strip_prefix(prefix)
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|d| (1..=3).contains(d))
}
