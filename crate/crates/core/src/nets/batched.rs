//! Batched dense networks over `K`-component Taylor jets with a layer-level
//! reverse pass.
//!
//! `K = 1` is plain real evaluation; `K = 4` carries the `[val, ∂t, ∂x, ∂²x]`
//! coefficients of [`HyperDual`](crate::autodiff::HyperDual) for every unit.
//! Each forward call records per-layer inputs and pre-activations (the tape);
//! [`backward`] replays them in reverse and propagates one adjoint per Taylor
//! coefficient, the same algebra as [`Tape`](crate::autodiff::Tape) applied a
//! layer at a time. Rows may share one parameter vector or each carry their own,
//! which is how generated main networks are evaluated.

use std::cell::RefCell;

use super::arch::{Activation, ArchSpec, Layer};
use super::hyper::NetArch;
use crate::autodiff::{chain_vjp, HyperDual};
use crate::error::{Error, Result};

/// Rows of `width` units, each unit carrying `K` coefficients.
/// Layout is `[row][component][unit]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jets<const K: usize> {
    rows: usize,
    width: usize,
    data: Vec<f64>,
}

// Buffers of dropped batches, reused by later ones on the same thread. A
// training step allocates and frees several megabytes; recycling them keeps
// the allocator from handing pages back to the kernel every iteration.
const POOL_LIMIT: usize = 64;

thread_local! {
    static POOL: RefCell<Vec<Vec<f64>>> = const { RefCell::new(Vec::new()) };
}

fn take_buffer(len: usize) -> Vec<f64> {
    let reused = POOL.with(|p| {
        let mut pool = p.borrow_mut();
        let best = pool
            .iter()
            .enumerate()
            .filter(|(_, b)| b.capacity() >= len)
            .min_by_key(|(_, b)| b.capacity())
            .map(|(i, _)| i)?;
        Some(pool.swap_remove(best))
    });
    match reused {
        Some(mut b) => {
            b.clear();
            b.resize(len, 0.0);
            b
        }
        None => vec![0.0; len],
    }
}

impl<const K: usize> Drop for Jets<K> {
    fn drop(&mut self) {
        let buf = std::mem::take(&mut self.data);
        if buf.capacity() == 0 {
            return;
        }
        // `try_with` because the pool may already be gone during thread exit
        let _ = POOL.try_with(|p| {
            let mut pool = p.borrow_mut();
            if pool.len() < POOL_LIMIT {
                pool.push(buf);
            }
        });
    }
}

impl<const K: usize> Jets<K> {
    pub fn zeros(rows: usize, width: usize) -> Self {
        Self {
            rows,
            width,
            data: take_buffer(rows * K * width),
        }
    }

    pub fn from_data(rows: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * K * width {
            return Err(Error::Internal(format!(
                "jet batch {rows}x{K}x{width} given {} values",
                data.len()
            )));
        }
        Ok(Self { rows, width, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(mut self) -> Vec<f64> {
        std::mem::take(&mut self.data)
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        let s = K * self.width;
        &self.data[r * s..(r + 1) * s]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        let s = K * self.width;
        &mut self.data[r * s..(r + 1) * s]
    }

    #[inline]
    pub fn get(&self, r: usize, comp: usize, unit: usize) -> f64 {
        self.data[(r * K + comp) * self.width + unit]
    }

    #[inline]
    pub fn set(&mut self, r: usize, comp: usize, unit: usize, v: f64) {
        self.data[(r * K + comp) * self.width + unit] = v;
    }
}

impl Jets<4> {
    pub fn hyperdual(&self, r: usize, unit: usize) -> HyperDual {
        HyperDual::new(
            self.get(r, 0, unit),
            self.get(r, 1, unit),
            self.get(r, 2, unit),
            self.get(r, 3, unit),
        )
    }

    pub fn set_hyperdual(&mut self, r: usize, unit: usize, v: HyperDual) {
        for (c, x) in v.to_array().into_iter().enumerate() {
            self.set(r, c, unit, x);
        }
    }
}

/// Where each row finds its network parameters.
#[derive(Debug, Clone, Copy)]
pub enum RowParams<'a> {
    Shared(&'a [f64]),
    PerRow { data: &'a [f64], stride: usize },
}

impl<'a> RowParams<'a> {
    #[inline]
    fn row(&self, r: usize) -> &'a [f64] {
        match *self {
            RowParams::Shared(p) => p,
            RowParams::PerRow { data, stride } => &data[r * stride..(r + 1) * stride],
        }
    }
}

/// Where each row accumulates its parameter gradient.
#[derive(Debug)]
pub enum RowGrads<'a> {
    Shared(&'a mut [f64]),
    PerRow { data: &'a mut [f64], stride: usize },
}

impl RowGrads<'_> {
    #[inline]
    fn row(&mut self, r: usize) -> &mut [f64] {
        match self {
            RowGrads::Shared(g) => g,
            RowGrads::PerRow { data, stride } => &mut data[r * *stride..(r + 1) * *stride],
        }
    }
}

/// Per-layer record of one forward pass.
#[derive(Debug, Clone)]
pub struct Trace<const K: usize> {
    layers: Vec<Layer>,
    inputs: Vec<Jets<K>>,
    pre: Vec<Jets<K>>,
}

/// Dot product with four independent partial sums, so the additions pipeline.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a4, a_tail) = a[..n].split_at(n - n % 4);
    let (b4, b_tail) = b[..n].split_at(n - n % 4);
    let mut acc = [0.0; 4];
    for (x, y) in a4.chunks_exact(4).zip(b4.chunks_exact(4)) {
        for i in 0..4 {
            acc[i] += x[i] * y[i];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in a_tail.iter().zip(b_tail) {
        s += x * y;
    }
    s
}

fn check_params(spec: &ArchSpec, params: &RowParams<'_>, rows: usize) -> Result<()> {
    let n = spec.param_count();
    let ok = match *params {
        RowParams::Shared(p) => p.len() == n,
        RowParams::PerRow { data, stride } => stride == n && data.len() >= rows * stride,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::config(format!("parameter block does not fit {spec} for {rows} rows")))
    }
}

fn dense_forward<const K: usize>(layer: &Layer, params: &RowParams<'_>, input: &Jets<K>) -> Jets<K> {
    let (fi, fo) = (layer.fan_in, layer.fan_out);
    let mut out = Jets::<K>::zeros(input.rows, fo);
    for r in 0..input.rows {
        let p = params.row(r);
        let w = &p[layer.w_offset..layer.b_offset];
        let b = &p[layer.b_offset..layer.end()];
        let h = input.row(r);
        let z = out.row_mut(r);
        for c in 0..K {
            let hc = &h[c * fi..(c + 1) * fi];
            let zc = &mut z[c * fo..(c + 1) * fo];
            for o in 0..fo {
                let base = if c == 0 { b[o] } else { 0.0 };
                zc[o] = base + dot(&w[o * fi..(o + 1) * fi], hc);
            }
        }
    }
    out
}

fn tanh_forward<const K: usize>(pre: &Jets<K>) -> Jets<K> {
    let w = pre.width;
    let mut out = Jets::<K>::zeros(pre.rows, w);
    for r in 0..pre.rows {
        let z = pre.row(r);
        let y = out.row_mut(r);
        for u in 0..w {
            let s = z[u].tanh();
            y[u] = s;
            if K == 4 {
                let g1 = 1.0 - s * s;
                let g2 = -2.0 * s * g1;
                let (zt, zx, zxx) = (z[w + u], z[2 * w + u], z[3 * w + u]);
                y[w + u] = g1 * zt;
                y[2 * w + u] = g1 * zx;
                y[3 * w + u] = g1 * zxx + g2 * zx * zx;
            } else {
                for c in 1..K {
                    y[c * w + u] = (1.0 - s * s) * z[c * w + u];
                }
            }
        }
    }
    out
}

/// Forward pass; returns the output batch and the trace [`backward`] needs.
pub fn forward<const K: usize>(
    spec: &ArchSpec,
    params: RowParams<'_>,
    input: Jets<K>,
) -> Result<(Jets<K>, Trace<K>)> {
    if input.width != spec.input_dim {
        return Err(Error::config(format!(
            "{spec} takes {} inputs, batch has width {}",
            spec.input_dim, input.width
        )));
    }
    check_params(spec, &params, input.rows)?;
    let layers = spec.layers();
    let mut inputs = Vec::with_capacity(layers.len());
    let mut pres = Vec::with_capacity(layers.len());
    let mut h = input;
    for layer in &layers {
        let z = dense_forward(layer, &params, &h);
        inputs.push(h);
        // an identity layer's reverse step never reads its pre-activation
        h = match layer.activation {
            Activation::Tanh => {
                let next = tanh_forward(&z);
                pres.push(z);
                next
            }
            Activation::Identity => {
                pres.push(Jets::zeros(0, 0));
                z
            }
        };
    }
    Ok((h, Trace { layers, inputs, pre: pres }))
}

/// Forward pass without keeping a trace.
pub fn predict<const K: usize>(spec: &ArchSpec, params: RowParams<'_>, input: Jets<K>) -> Result<Jets<K>> {
    if input.width != spec.input_dim {
        return Err(Error::config(format!(
            "{spec} takes {} inputs, batch has width {}",
            spec.input_dim, input.width
        )));
    }
    check_params(spec, &params, input.rows)?;
    let mut h = input;
    for layer in &spec.layers() {
        let z = dense_forward(layer, &params, &h);
        h = match layer.activation {
            Activation::Tanh => tanh_forward(&z),
            Activation::Identity => z,
        };
    }
    Ok(h)
}

/// Reverse pass. Accumulates parameter gradients into `grads`; the adjoint of
/// the network input is not formed.
pub fn backward<const K: usize>(params: RowParams<'_>, trace: &Trace<K>, out_adj: Jets<K>, grads: &mut RowGrads<'_>) {
    let mut ya = out_adj;
    for (l, layer) in trace.layers.iter().enumerate().rev() {
        let (fi, fo) = (layer.fan_in, layer.fan_out);
        let pre = &trace.pre[l];
        let h = &trace.inputs[l];
        let za = match layer.activation {
            Activation::Identity => ya,
            Activation::Tanh => {
                let post = &trace.inputs[l + 1];
                let mut za = ya;
                for r in 0..za.rows {
                    let z = pre.row(r);
                    let s_row = post.row(r);
                    let g = za.row_mut(r);
                    for u in 0..fo {
                        let s = s_row[u];
                        let g1 = 1.0 - s * s;
                        if K == 4 {
                            let g2 = -2.0 * s * g1;
                            let g3 = -2.0 * (g1 * g1 + s * g2);
                            let a = HyperDual::new(z[u], z[fo + u], z[2 * fo + u], z[3 * fo + u]);
                            let ga = HyperDual::new(g[u], g[fo + u], g[2 * fo + u], g[3 * fo + u]);
                            let out = chain_vjp(ga, a, g1, g2, g3);
                            g[u] = out.val;
                            g[fo + u] = out.dt;
                            g[2 * fo + u] = out.dx;
                            g[3 * fo + u] = out.dxx;
                        } else {
                            // only K = 1 reaches here in practice
                            let g2 = -2.0 * s * g1;
                            let mut val = g[u] * g1;
                            for c in 1..K {
                                val += g[c * fo + u] * g2 * z[c * fo + u];
                                g[c * fo + u] *= g1;
                            }
                            g[u] = val;
                        }
                    }
                }
                za
            }
        };
        let first = l == 0;
        let mut ha = Jets::<K>::zeros(if first { 0 } else { za.rows }, fi);
        for r in 0..za.rows {
            let p = params.row(r);
            let w = &p[layer.w_offset..layer.b_offset];
            let gp = grads.row(r);
            let zr = za.row(r);
            let hr = h.row(r);
            let har = if first { &mut [][..] } else { ha.row_mut(r) };
            for c in 0..K {
                let hc = &hr[c * fi..(c + 1) * fi];
                let zc = &zr[c * fo..(c + 1) * fo];
                for o in 0..fo {
                    let g = zc[o];
                    if g == 0.0 {
                        continue;
                    }
                    if c == 0 {
                        gp[layer.b_offset + o] += g;
                    }
                    let gw = &mut gp[layer.w_offset + o * fi..layer.w_offset + (o + 1) * fi];
                    for (gwi, hi) in gw.iter_mut().zip(hc) {
                        *gwi += g * hi;
                    }
                    if !first {
                        let hac = &mut har[c * fi..(c + 1) * fi];
                        for (hai, wi) in hac.iter_mut().zip(&w[o * fi..(o + 1) * fi]) {
                            *hai += g * wi;
                        }
                    }
                }
            }
        }
        ya = ha;
    }
}

/// Inputs for one batched model evaluation.
#[derive(Debug, Clone)]
pub enum BatchInput<const K: usize> {
    /// Full network input per row (coordinates and encoded parameters).
    Plain(Jets<K>),
    /// Hypernetwork input per row plus the main-network input per row.
    Hyper { lambda: Jets<1>, main: Jets<K> },
}

/// Evaluates a model over a batch; `head` turns the outputs into a loss
/// summary and the adjoint of the outputs. Returns the summary and the
/// gradient over the trainable parameters.
pub fn value_and_grad<const K: usize, T>(
    arch: &NetArch,
    theta: &[f64],
    input: BatchInput<K>,
    head: impl FnOnce(&Jets<K>) -> Result<(T, Jets<K>)>,
) -> Result<(T, Vec<f64>)> {
    let mut grad = vec![0.0; arch.trainable_count()];
    if theta.len() != grad.len() {
        return Err(Error::config(format!(
            "model has {} trainable parameters, got {}",
            grad.len(),
            theta.len()
        )));
    }
    match (arch, input) {
        (NetArch::Plain(spec), BatchInput::Plain(x)) => {
            let (out, trace) = forward(spec, RowParams::Shared(theta), x)?;
            let (summary, adj) = head(&out)?;
            backward(RowParams::Shared(theta), &trace, adj, &mut RowGrads::Shared(&mut grad));
            Ok((summary, grad))
        }
        (NetArch::Hyper { hyper, main }, BatchInput::Hyper { lambda, main: x }) => {
            if lambda.rows != x.rows {
                return Err(Error::Internal("hyper and main batches differ in rows".into()));
            }
            let rows = x.rows;
            let stride = main.param_count();
            let (generated, htrace) = forward(hyper, RowParams::Shared(theta), lambda)?;
            let gen = RowParams::PerRow {
                data: generated.data(),
                stride,
            };
            let (out, mtrace) = forward(main, gen, x)?;
            let (summary, adj) = head(&out)?;
            let mut gen_grad = vec![0.0; rows * stride];
            backward(
                gen,
                &mtrace,
                adj,
                &mut RowGrads::PerRow {
                    data: &mut gen_grad,
                    stride,
                },
            );
            let gen_adj = Jets::<1>::from_data(rows, stride, gen_grad)?;
            backward(RowParams::Shared(theta), &htrace, gen_adj, &mut RowGrads::Shared(&mut grad));
            Ok((summary, grad))
        }
        _ => Err(Error::Internal("batch input does not match the model kind".into())),
    }
}

/// Forward-only evaluation of a model over a batch.
pub fn predict_model<const K: usize>(arch: &NetArch, theta: &[f64], input: BatchInput<K>) -> Result<Jets<K>> {
    match (arch, input) {
        (NetArch::Plain(spec), BatchInput::Plain(x)) => predict(spec, RowParams::Shared(theta), x),
        (NetArch::Hyper { hyper, main }, BatchInput::Hyper { lambda, main: x }) => {
            let generated = predict(hyper, RowParams::Shared(theta), lambda)?;
            predict(
                main,
                RowParams::PerRow {
                    data: generated.data(),
                    stride: main.param_count(),
                },
                x,
            )
        }
        _ => Err(Error::Internal("batch input does not match the model kind".into())),
    }
}
