//! Full pipeline on a synthetic corpus, single worker against the whole pool.
//! Built with `--no-default-features` both rows run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use labelmine::cluster::Dictionary;
use labelmine::synth::{generate, SynthParams};
use labelmine::{run_pipeline, Corpus, DuplicatePolicy, RunConfig};

fn corpus(samples: usize) -> Corpus {
    let params = SynthParams {
        families: 12,
        samples,
        vendors: 20,
        noise: 0.3,
        misspell: 0.1,
        seed: 7,
    };
    let synth = generate(&params, &Dictionary::bundled()).unwrap();
    Corpus::new().add_reports(synth.reports, DuplicatePolicy::Reject).unwrap()
}

fn pipeline(c: &mut Criterion) {
    let dict = Dictionary::bundled();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for samples in [100, 400] {
        let corpus = corpus(samples);
        for (name, threads) in [("sequential", 1), ("parallel", 0)] {
            let config = RunConfig {
                threads,
                ..RunConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(name, samples), &corpus, |b, corpus| {
                b.iter(|| run_pipeline(black_box(corpus), &config, &dict).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
