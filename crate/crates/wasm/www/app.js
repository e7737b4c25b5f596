import init, { verifyAlgebra, classify, homCheck } from "./pkg/blockalg_wasm.js";

const $ = (id) => document.getElementById(id);

function algebra() {
  const choice = document.querySelector("input[name=alg]:checked").value;
  return choice === "custom" ? $("spec").value : choice;
}

function summary(op, r) {
  if (op === "classify") {
    const degs = r.degrees.map((d) => `(${d.r},${d.s}): ${d.stable_dim}${d.matched_names.length ? " " + d.matched_names.join("+") : ""}`).join(", ") || "none";
    return [`total dimension ${r.total_dim}`, `nonzero degrees ${degs}`, r.warnings.length ? "warnings present" : ""]
      .filter(Boolean).join("; ");
  }
  return r.pass ? "pass" : "fail";
}

function run(op, call) {
  $("status").textContent = "working...";
  $("status").className = "";
  $("out").textContent = "";
  // let the status line paint before the synchronous call
  setTimeout(() => {
    const t0 = performance.now();
    try {
      const r = JSON.parse(call());
      const ms = Math.round(performance.now() - t0);
      $("status").textContent = `${summary(op, r)} (${ms} ms)`;
      $("status").className = op === "classify" || r.pass ? "pass" : "fail";
      $("out").textContent = JSON.stringify(r, null, 2);
    } catch (e) {
      $("status").textContent = `error: ${e}`;
      $("status").className = "fail";
    }
  }, 20);
}

await init();

for (const radio of document.querySelectorAll("input[name=alg]")) {
  radio.addEventListener("change", () => { $("spec").hidden = radio.value !== "custom" || !radio.checked; });
}

$("verify").onclick = () => run("verify", () => verifyAlgebra(algebra(), $("q").value, $("verify-window").value));
$("classify").onclick = () =>
  run("classify", () =>
    classify(algebra(), $("q").value, $("shift").value, Number($("rmax").value), Number($("smax").value), $("windows").value));
$("hom").onclick = () => run("hom", () => homCheck(algebra(), $("q").value, $("map").value, $("hom-window").value));
