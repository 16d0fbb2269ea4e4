/**
 * Deterministic PRNG for crop sampling and the toy encoder's projection.
 *
 * mulberry32 over a 32-bit state, seeded from integers or strings (FNV-1a).
 * Identical seeds produce identical streams on every platform, which is what
 * makes bundle bytes reproducible.
 */

export function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export class Rng {
  private state: number;

  constructor(seed: number | string) {
    const n = typeof seed === "string" ? fnv1a(seed) : seed >>> 0;
    this.state = (n ^ 0x9e3779b9) >>> 0;
    // decorrelate nearby integer seeds
    this.next();
    this.next();
  }

  /** Uniform float in [0, 1). */
  next(): number {
    this.state = (this.state + 0x6d2b79f5) >>> 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  /** Uniform integer in [0, n). */
  int(n: number): number {
    return Math.floor(this.next() * n);
  }

  /** Uniform float in [lo, hi). */
  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.next();
  }

  /** Standard normal via Box-Muller. */
  gauss(): number {
    let u = 0;
    while (u === 0) u = this.next();
    const v = this.next();
    return Math.sqrt(-2.0 * Math.log(u)) * Math.cos(2.0 * Math.PI * v);
  }

  /** Child generator for a named substream. */
  fork(label: string): Rng {
    return new Rng(fnv1a(label) ^ Math.floor(this.next() * 4294967296));
  }
}

/** Stable substream seed for (seed, name) without consuming parent state. */
export function substream(seed: number | string, name: string): Rng {
  const base = typeof seed === "string" ? fnv1a(seed) : seed >>> 0;
  return new Rng((Math.imul(base, 0x85ebca6b) ^ fnv1a(name)) >>> 0);
}
