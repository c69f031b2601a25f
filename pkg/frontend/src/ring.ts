// Fixed-capacity ring buffer for telemetry history. Old frames fall off the
// back; rendering only ever reads, never mutates.

export class RingBuffer<T> {
  private items: T[] = [];
  private start = 0;

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity < 1) {
      throw new Error(`ring capacity must be a positive integer, got ${capacity}`);
    }
  }

  get length(): number {
    return this.items.length;
  }

  push(item: T): void {
    if (this.items.length < this.capacity) {
      this.items.push(item);
      return;
    }
    this.items[this.start] = item;
    this.start = (this.start + 1) % this.capacity;
  }

  /** index 0 is the oldest retained item */
  at(index: number): T {
    if (index < 0 || index >= this.items.length) {
      throw new RangeError(`index ${index} out of range 0..${this.items.length - 1}`);
    }
    return this.items[(this.start + index) % this.items.length];
  }

  last(): T | undefined {
    if (this.items.length === 0) return undefined;
    return this.at(this.items.length - 1);
  }

  toArray(): T[] {
    const out: T[] = [];
    for (let i = 0; i < this.items.length; i++) out.push(this.at(i));
    return out;
  }

  clear(): void {
    this.items = [];
    this.start = 0;
  }
}
