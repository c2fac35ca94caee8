//! Checkpoint container: every parameter array with shape headers, batch-norm
//! running state, Adam state, step counters, and the hyperparameters in use.
//! Little-endian binary; write -> read round-trips are bit-exact.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::adam::AdamState;
use super::model::{ConvBlockParams, HeadParams, ModelParams, ParamGroup};
use super::tensor::Tensor;
use crate::error::{DafdError, Result};

const MAGIC: &[u8; 8] = b"DAFDCKPT";
const VERSION: u32 = 1;

/// One Adam state per optimized parameter group.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub extractor: AdamState,
    pub fall_head: AdamState,
    pub domain_head: AdamState,
}

impl OptimizerState {
    pub fn for_model(params: &ModelParams) -> Self {
        OptimizerState {
            extractor: AdamState::for_params(&params.group(ParamGroup::Extractor)),
            fall_head: AdamState::for_params(&params.group(ParamGroup::FallHead)),
            domain_head: AdamState::for_params(&params.group(ParamGroup::DomainHead)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub opt: OptimizerState,
    pub dropout: f64,
    pub lr: f64,
    pub lambda: f64,
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Writer { buf: Vec::new() }
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn array(&mut self, name: &str, t: &Tensor) {
        let name = name.as_bytes();
        self.u32(name.len() as u32);
        self.buf.extend_from_slice(name);
        self.u32(t.shape().len() as u32);
        for &d in t.shape() {
            self.u32(d as u32);
        }
        for &v in t.data() {
            self.f64(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: std::path::PathBuf,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(DafdError::parse(&self.path, 0, "truncated checkpoint"));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn array(&mut self) -> Result<(String, Tensor)> {
        let name_len = self.u32()? as usize;
        let name = String::from_utf8(self.take(name_len)?.to_vec())
            .map_err(|_| DafdError::parse(&self.path, 0, "non-utf8 array name"))?;
        let ndim = self.u32()? as usize;
        let mut shape = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            shape.push(self.u32()? as usize);
        }
        let n: usize = shape.iter().product();
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(self.f64()?);
        }
        Ok((name, Tensor::from_vec(&shape, data)?))
    }
}

fn adam_array_names(group: &str, count: usize) -> Vec<(String, String)> {
    (0..count)
        .map(|i| (format!("adam.{group}.m.{i}"), format!("adam.{group}.v.{i}")))
        .collect()
}

pub fn save_checkpoint(ckpt: &Checkpoint, path: &Path) -> Result<()> {
    let mut w = Writer::new();
    w.buf.extend_from_slice(MAGIC);
    w.u32(VERSION);
    w.f64(ckpt.dropout);
    w.f64(ckpt.lr);
    w.f64(ckpt.lambda);
    w.u64(ckpt.opt.extractor.t);
    w.u64(ckpt.opt.fall_head.t);
    w.u64(ckpt.opt.domain_head.t);

    let mut arrays: Vec<(String, &Tensor)> = Vec::new();
    for (name, _, t) in ckpt.params.named_learnables() {
        arrays.push((name, t));
    }
    for (i, layer) in ckpt.params.extractor.iter().enumerate() {
        arrays.push((format!("extractor.{i}.running_mean"), &layer.running_mean));
        arrays.push((format!("extractor.{i}.running_var"), &layer.running_var));
    }
    for (group, state) in [
        ("extractor", &ckpt.opt.extractor),
        ("fall_head", &ckpt.opt.fall_head),
        ("domain_head", &ckpt.opt.domain_head),
    ] {
        for (i, (m_name, v_name)) in adam_array_names(group, state.m.len()).into_iter().enumerate()
        {
            arrays.push((m_name, &state.m[i]));
            arrays.push((v_name, &state.v[i]));
        }
    }
    w.u32(arrays.len() as u32);
    for (name, t) in arrays {
        w.array(&name, t);
    }

    let mut file = fs::File::create(path).map_err(|e| DafdError::io(path, e))?;
    file.write_all(&w.buf).map_err(|e| DafdError::io(path, e))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let buf = fs::read(path).map_err(|e| DafdError::io(path, e))?;
    let mut r = Reader {
        buf: &buf,
        pos: 0,
        path: path.to_path_buf(),
    };
    if r.take(8)? != MAGIC {
        return Err(DafdError::parse(path, 0, "not a DAFD checkpoint"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(DafdError::parse(
            path,
            0,
            format!("unsupported checkpoint version {version}"),
        ));
    }
    let dropout = r.f64()?;
    let lr = r.f64()?;
    let lambda = r.f64()?;
    let t_extractor = r.u64()?;
    let t_fall = r.u64()?;
    let t_domain = r.u64()?;
    let count = r.u32()? as usize;
    let mut map: BTreeMap<String, Tensor> = BTreeMap::new();
    for _ in 0..count {
        let (name, t) = r.array()?;
        map.insert(name, t);
    }

    let mut get = |name: String| -> Result<Tensor> {
        map.remove(&name)
            .ok_or_else(|| DafdError::parse(path, 0, format!("checkpoint missing array {name}")))
    };

    let mut blocks = Vec::with_capacity(3);
    for i in 0..3 {
        blocks.push(ConvBlockParams {
            conv_w: get(format!("extractor.{i}.conv_w"))?,
            conv_b: get(format!("extractor.{i}.conv_b"))?,
            gamma: get(format!("extractor.{i}.gamma"))?,
            beta: get(format!("extractor.{i}.beta"))?,
            running_mean: get(format!("extractor.{i}.running_mean"))?,
            running_var: get(format!("extractor.{i}.running_var"))?,
        });
    }
    let head = |prefix: &str,
                    get: &mut dyn FnMut(String) -> Result<Tensor>|
     -> Result<HeadParams> {
        Ok(HeadParams {
            w1: get(format!("{prefix}.w1"))?,
            b1: get(format!("{prefix}.b1"))?,
            w2: get(format!("{prefix}.w2"))?,
            b2: get(format!("{prefix}.b2"))?,
        })
    };
    let fall_head = head("fall_head", &mut get)?;
    let domain_head = head("domain_head", &mut get)?;
    let params = ModelParams {
        extractor: blocks.try_into().expect("three extractor blocks"),
        fall_head,
        domain_head,
    };

    let mut adam_group = |group: &str, count: usize, t: u64| -> Result<AdamState> {
        let mut m = Vec::with_capacity(count);
        let mut v = Vec::with_capacity(count);
        for i in 0..count {
            m.push(get(format!("adam.{group}.m.{i}"))?);
            v.push(get(format!("adam.{group}.v.{i}"))?);
        }
        Ok(AdamState { m, v, t })
    };
    let opt = OptimizerState {
        extractor: adam_group("extractor", 12, t_extractor)?,
        fall_head: adam_group("fall_head", 4, t_fall)?,
        domain_head: adam_group("domain_head", 4, t_domain)?,
    };

    // shape sanity against the fixed architecture
    let template = ModelParams::init(0);
    for ((_, _, expect), (_, _, got)) in template
        .named_learnables()
        .iter()
        .zip(params.named_learnables().iter())
    {
        if expect.shape() != got.shape() {
            return Err(DafdError::parse(
                path,
                0,
                format!(
                    "array shape {:?} does not match architecture {:?}",
                    got.shape(),
                    expect.shape()
                ),
            ));
        }
    }

    Ok(Checkpoint {
        params,
        opt,
        dropout,
        lr,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let params = ModelParams::init(123);
        let mut opt = OptimizerState::for_model(&params);
        opt.extractor.t = 17;
        opt.fall_head.m[0].data_mut()[0] = 0.1234567890123456789;
        let ckpt = Checkpoint {
            params,
            opt,
            dropout: 0.2,
            lr: 0.0005,
            lambda: 0.31,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&ckpt, &path).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded, ckpt);
        // bitwise check on a float that exercises full precision
        assert_eq!(
            loaded.opt.fall_head.m[0].data()[0].to_bits(),
            ckpt.opt.fall_head.m[0].data()[0].to_bits()
        );
    }

    #[test]
    fn corrupt_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ckpt");
        std::fs::write(&path, b"NOTADAFD").unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
