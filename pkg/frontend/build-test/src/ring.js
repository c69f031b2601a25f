"use strict";
// Fixed-capacity ring buffer for telemetry history. Old frames fall off the
// back; rendering only ever reads, never mutates.
Object.defineProperty(exports, "__esModule", { value: true });
exports.RingBuffer = void 0;
class RingBuffer {
    constructor(capacity) {
        this.capacity = capacity;
        this.items = [];
        this.start = 0;
        if (!Number.isInteger(capacity) || capacity < 1) {
            throw new Error(`ring capacity must be a positive integer, got ${capacity}`);
        }
    }
    get length() {
        return this.items.length;
    }
    push(item) {
        if (this.items.length < this.capacity) {
            this.items.push(item);
            return;
        }
        this.items[this.start] = item;
        this.start = (this.start + 1) % this.capacity;
    }
    /** index 0 is the oldest retained item */
    at(index) {
        if (index < 0 || index >= this.items.length) {
            throw new RangeError(`index ${index} out of range 0..${this.items.length - 1}`);
        }
        return this.items[(this.start + index) % this.items.length];
    }
    last() {
        if (this.items.length === 0)
            return undefined;
        return this.at(this.items.length - 1);
    }
    toArray() {
        const out = [];
        for (let i = 0; i < this.items.length; i++)
            out.push(this.at(i));
        return out;
    }
    clear() {
        this.items = [];
        this.start = 0;
    }
}
exports.RingBuffer = RingBuffer;
