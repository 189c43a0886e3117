import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { assertCcdfMonotone, renderFigure } from "../src/figures";
import { main } from "../src/cli";

const FIXTURES = path.join(__dirname, "fixtures");
let workDir: string;

beforeAll(() => {
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), "plots-test-"));
  // assemble one input dir per figure from the fixtures
  for (const fig of ["fig2", "fig3", "fig4", "fig5"]) {
    fs.mkdirSync(path.join(workDir, fig), { recursive: true });
  }
  fs.copyFileSync(path.join(FIXTURES, "ccdf.csv"), path.join(workDir, "fig2", "ccdf.csv"));
  fs.copyFileSync(path.join(FIXTURES, "sweep_proactiveness.csv"),
    path.join(workDir, "fig3", "sweep_proactiveness.csv"));
  fs.copyFileSync(path.join(FIXTURES, "sweep_proactiveness_fig4.csv"),
    path.join(workDir, "fig4", "sweep_proactiveness.csv"));
  fs.copyFileSync(path.join(FIXTURES, "sweep_traffic_intensity_mbps.csv"),
    path.join(workDir, "fig5", "sweep_traffic_intensity_mbps.csv"));
});

afterAll(() => {
  fs.rmSync(workDir, { recursive: true, force: true });
});

function seriesCount(svg: string): number {
  return (svg.match(/class="series"/g) ?? []).length;
}

describe("figure rendering", () => {
  it("fig2 draws one line per scheme on log axes", () => {
    const out = renderFigure("fig2", path.join(workDir, "fig2"), path.join(workDir, "out2"));
    const svg = fs.readFileSync(out, "utf-8");
    expect(seriesCount(svg)).toBe(4);
    for (const scheme of ["proposed_1_3", "proposed_1_6", "baseline1", "baseline2"]) {
      expect(svg).toContain(`data-name="${scheme}"`);
    }
  });

  it("fig3 draws scheme series with std bands", () => {
    const out = renderFigure("fig3", path.join(workDir, "fig3"), path.join(workDir, "out3"));
    const svg = fs.readFileSync(out, "utf-8");
    expect(seriesCount(svg)).toBe(3);
    expect((svg.match(/class="band"/g) ?? []).length).toBe(3);
  });

  it("fig4 draws delay solid plus dashed hit rate per z", () => {
    const out = renderFigure("fig4", path.join(workDir, "fig4"), path.join(workDir, "out4"));
    const svg = fs.readFileSync(out, "utf-8");
    expect(seriesCount(svg)).toBe(8); // 4 z values x (delay + hit rate)
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain("cache hit rate");
  });

  it("fig5 renders traffic sweep", () => {
    const out = renderFigure("fig5", path.join(workDir, "fig5"), path.join(workDir, "out5"));
    const svg = fs.readFileSync(out, "utf-8");
    expect(seriesCount(svg)).toBe(3);
  });

  it("re-rendering is byte-identical (no timestamps)", () => {
    const a = fs.readFileSync(
      renderFigure("fig2", path.join(workDir, "fig2"), path.join(workDir, "idem_a")), "utf-8");
    const b = fs.readFileSync(
      renderFigure("fig2", path.join(workDir, "fig2"), path.join(workDir, "idem_b")), "utf-8");
    expect(a).toBe(b);
  });

  it("rendering never mutates its inputs", () => {
    const input = path.join(workDir, "fig2", "ccdf.csv");
    const before = fs.readFileSync(input, "utf-8");
    renderFigure("fig2", path.join(workDir, "fig2"), path.join(workDir, "out_mut"));
    expect(fs.readFileSync(input, "utf-8")).toBe(before);
  });

  it("CCDF monotonicity assertion rejects corrupted series", () => {
    expect(() => assertCcdfMonotone([[0.1, 0.5], [0.2, 0.8]], "bad")).toThrowError(/monotone/);
    const dir = path.join(workDir, "corrupt");
    fs.mkdirSync(dir, { recursive: true });
    const lines = fs.readFileSync(path.join(FIXTURES, "ccdf.csv"), "utf-8").trimEnd().split("\n");
    // swap two probabilities of one series to break monotonicity
    const cells3 = lines[3].split(",");
    const cells1 = lines[1].split(",");
    [cells1[1], cells3[1]] = [cells3[1], cells1[1]];
    lines[1] = cells1.join(",");
    lines[3] = cells3.join(",");
    fs.writeFileSync(path.join(dir, "ccdf.csv"), lines.join("\n") + "\n");
    expect(() => renderFigure("fig2", dir, path.join(workDir, "out_corrupt")))
      .toThrowError(/monotone/);
  });

  it("missing and empty inputs produce named errors", () => {
    expect(() => renderFigure("fig3", path.join(workDir, "nope"), workDir))
      .toThrowError(/sweep_proactiveness\.csv/);
    const dir = path.join(workDir, "empty");
    fs.mkdirSync(dir, { recursive: true });
    const header = fs.readFileSync(path.join(FIXTURES, "sweep_proactiveness.csv"), "utf-8")
      .split("\n")[0];
    fs.writeFileSync(path.join(dir, "sweep_proactiveness.csv"), header + "\n");
    expect(() => renderFigure("fig3", dir, workDir)).toThrowError(/no data rows/);
  });

  it("contract violations abort rendering with the offending file named", () => {
    const dir = path.join(workDir, "permuted");
    fs.mkdirSync(dir, { recursive: true });
    const content = fs.readFileSync(path.join(FIXTURES, "sweep_proactiveness.csv"), "utf-8");
    const lines = content.split("\n");
    const header = lines[0].split(",");
    [header[0], header[1]] = [header[1], header[0]];
    lines[0] = header.join(",");
    fs.writeFileSync(path.join(dir, "sweep_proactiveness.csv"), lines.join("\n"));
    expect(() => renderFigure("fig3", dir, workDir)).toThrowError(/contract violation/);
  });
});

describe("cli", () => {
  it("render and validate round-trip through the command surface", () => {
    const out = path.join(workDir, "cli_out");
    expect(main(["render", "--figure", "fig2", "--in", path.join(workDir, "fig2"),
      "--out", out])).toBe(0);
    expect(fs.existsSync(path.join(out, "fig2.svg"))).toBe(true);
    expect(main(["validate", "--file", path.join(FIXTURES, "summary.csv"),
      "--kind", "summary"])).toBe(0);
  });

  it("validate exits 2 on a violated contract", () => {
    const bad = path.join(workDir, "bad_summary.csv");
    const content = fs.readFileSync(path.join(FIXTURES, "summary.csv"), "utf-8");
    const lines = content.split("\n");
    const header = lines[0].split(",").reverse();
    lines[0] = header.join(",");
    fs.writeFileSync(bad, lines.join("\n"));
    expect(main(["validate", "--file", bad, "--kind", "summary"])).toBe(2);
  });

  it("unknown figure or command exits 1", () => {
    expect(main(["render", "--figure", "fig9", "--in", ".", "--out", "."])).toBe(1);
    expect(main(["frobnicate"])).toBe(1);
  });
});
