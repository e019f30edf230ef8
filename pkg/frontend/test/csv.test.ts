import assert from "node:assert/strict";
import { test } from "node:test";

import { PlotkitError, parseCsv, requireColumns, unknownColumns } from "../src/csv.js";

test("parse keeps raw tokens and parsed values", () => {
  const t = parseCsv("t,E\n0.000000000000e+00,1.5e-3\n5.0e-01,nan\n", "x.csv");
  assert.deepEqual(t.header, ["t", "E"]);
  assert.deepEqual(t.cols.get("t"), [0, 0.5]);
  assert.equal(t.rawCols.get("E")![0], "1.5e-3");
  assert.ok(Number.isNaN(t.cols.get("E")![1]));
});

test("empty csv rejected", () => {
  assert.throws(() => parseCsv("", "x.csv"), PlotkitError);
});

test("ragged rows rejected as malformed", () => {
  assert.throws(() => parseCsv("a,b\n1,2\n3\n", "x.csv"), /malformed CSV/);
});

test("non-numeric cells rejected as malformed", () => {
  assert.throws(() => parseCsv("a\nhello\n", "x.csv"), /malformed CSV/);
});

test("missing column error names the column", () => {
  const t = parseCsv("t,E\n0,1\n", "diag.csv");
  assert.throws(() => requireColumns(t, ["t", "H1w_v1"]), /"H1w_v1"/);
});

test("unknown columns detected against patterns", () => {
  const t = parseCsv("t,local_-5_5,mystery\n0,1,2\n", "diag.csv");
  assert.deepEqual(unknownColumns(t, ["t", /^local_/]), ["mystery"]);
});
