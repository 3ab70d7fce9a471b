/* Baseline reader runtime.
 *
 * Reads the inline manifest, wires controls to pre-rendered assets,
 * drives scroller stage activation and stepper navigation, and joins
 * the preview-reload and presenter-sync sockets when they exist.
 * A richer runtime bundle can be substituted at build time.
 */
(function () {
  "use strict";

  var manifestTag = document.getElementById("fidyll-manifest");
  if (!manifestTag) return;
  var manifest = JSON.parse(manifestTag.textContent);
  var target = document.body.getAttribute("data-fidyll-target");
  var role = window.FIDYLL_ROLE || "audience";
  var syncSocket = null;
  var syncSeq = 0;

  /* ---- canonical parameter/filename encoding (plain form only) ---- */

  function formatNumber(value) {
    if (Number.isInteger(value)) return String(value);
    return String(value);
  }

  function encodeValueString(value) {
    if (typeof value === "boolean") return value ? "true" : "false";
    if (typeof value === "number") return formatNumber(value);
    return percentEncode(String(value));
  }

  function percentEncode(text) {
    // keep [A-Za-z0-9._-]; escape everything else byte-wise
    return encodeURIComponent(text).replace(/[!~*'()]/g, function (ch) {
      return "%" + ch.charCodeAt(0).toString(16).toUpperCase();
    });
  }

  function assetFor(scene, params) {
    var keys = Object.keys(params).sort();
    var segments = [scene.graphic.name];
    for (var i = 0; i < keys.length; i++) {
      segments.push(keys[i] + "=" + encodeValueString(params[keys[i]]));
    }
    var name = segments.join("__") + ".png";
    return scene.assets[name] || null;
  }

  /* ---- per-scene parameter state ---- */

  var sceneState = manifest.scenes.map(function (scene) {
    var stage0 = scene.stages[0];
    return stage0 ? Object.assign({}, stage0.params) : {};
  });

  function applyState(sceneId, params) {
    sceneState[sceneId] = Object.assign({}, sceneState[sceneId], params);
    var scene = manifest.scenes[sceneId];
    if (!scene || scene.graphic.kind !== "serverScript") return;
    var asset = assetFor(scene, sceneState[sceneId]);
    if (!asset) return;
    var mount = document.getElementById("scene-" + sceneId + "-graphic");
    var img = mount && mount.querySelector("img");
    if (img) img.src = asset;
  }

  function showStage(sceneId, stageId) {
    var scene = manifest.scenes[sceneId];
    var stage = scene && scene.stages[stageId];
    if (stage) applyState(sceneId, stage.params);
  }

  /* ---- controls ---- */

  function decodeWidgetValue(input) {
    if (input.type === "checkbox") return input.checked;
    if (input.type === "range") return Number(input.value);
    var text = input.value;
    if (text === "true") return true;
    if (text === "false") return false;
    if (/^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/.test(text)) return Number(text);
    return text;
  }

  document.querySelectorAll(".control-group").forEach(function (group) {
    var sceneId = Number(group.getAttribute("data-scene"));
    group.querySelectorAll("[data-param]").forEach(function (input) {
      input.addEventListener("input", function () {
        var params = {};
        params[input.getAttribute("data-param")] = decodeWidgetValue(input);
        applyState(sceneId, params);
        if (role === "presenter" && syncSocket && syncSocket.readyState === 1) {
          syncSocket.send(JSON.stringify({
            kind: "stateUpdate",
            seq: ++syncSeq,
            sceneId: sceneId,
            params: sceneState[sceneId],
          }));
        }
      });
    });
  });

  /* ---- scroller: activate the stage nearest the viewport midpoint ---- */

  if (target === "scroller") {
    var stages = Array.prototype.slice.call(document.querySelectorAll(".stage"));
    var active = null;

    var updateActive = function () {
      var mid = window.innerHeight / 2;
      var best = null;
      var bestDistance = Infinity;
      stages.forEach(function (el) {
        var rect = el.getBoundingClientRect();
        var center = (rect.top + rect.bottom) / 2;
        var distance = Math.abs(center - mid);
        if (rect.top <= mid && rect.bottom > mid) distance = 0;
        if (distance < bestDistance) {
          bestDistance = distance;
          best = el;
        }
      });
      if (!best || best === active) return;
      if (active) active.classList.remove("active");
      active = best;
      active.classList.add("active");
      showStage(
        Number(active.getAttribute("data-scene")),
        Number(active.getAttribute("data-stage"))
      );
    };

    window.addEventListener("scroll", updateActive, { passive: true });
    window.addEventListener("resize", updateActive);
    updateActive();
  }

  /* ---- stepper navigation ---- */

  if (target === "stepper") {
    var slides = Array.prototype.slice.call(document.querySelectorAll(".slide"));
    var counter = document.getElementById("slide-counter");
    var current = 0;

    var show = function (index, broadcast) {
      if (index < 0 || index >= slides.length) return;
      slides[current].hidden = true;
      current = index;
      slides[current].hidden = false;
      if (counter) counter.textContent = (current + 1) + " / " + slides.length;
      showStage(
        Number(slides[current].getAttribute("data-scene")),
        Number(slides[current].getAttribute("data-stage"))
      );
      if (broadcast && role === "presenter" && syncSocket && syncSocket.readyState === 1) {
        syncSocket.send(JSON.stringify({
          kind: "slideChange",
          seq: ++syncSeq,
          slide: current,
        }));
      }
    };

    var prev = document.getElementById("slide-prev");
    var next = document.getElementById("slide-next");
    if (prev) prev.addEventListener("click", function () { show(current - 1, true); });
    if (next) next.addEventListener("click", function () { show(current + 1, true); });
    document.addEventListener("keydown", function (event) {
      if (event.key === "ArrowRight" || event.key === " ") show(current + 1, true);
      if (event.key === "ArrowLeft") show(current - 1, true);
    });
    show(0, false);

    /* presenter sync */
    try {
      var wsProto = location.protocol === "https:" ? "wss:" : "ws:";
      syncSocket = new WebSocket(wsProto + "//" + location.host + "/sync");
      syncSocket.addEventListener("open", function () {
        syncSocket.send(JSON.stringify({ kind: "hello", role: role }));
      });
      syncSocket.addEventListener("message", function (event) {
        if (role === "presenter") return;
        var message;
        try { message = JSON.parse(event.data); } catch (err) { return; }
        if (message.kind === "slideChange") show(message.slide, false);
        if (message.kind === "stateUpdate") applyState(message.sceneId, message.params);
      });
      syncSocket.addEventListener("error", function () { syncSocket = null; });
    } catch (err) {
      syncSocket = null;
    }
  }

  /* ---- preview live reload ---- */

  try {
    var reloadProto = location.protocol === "https:" ? "wss:" : "ws:";
    var reloadSocket = new WebSocket(reloadProto + "//" + location.host + "/reload");
    reloadSocket.addEventListener("message", function (event) {
      var message;
      try { message = JSON.parse(event.data); } catch (err) { return; }
      if (message.kind === "reload") location.reload();
    });
    reloadSocket.addEventListener("error", function () {});
  } catch (err) {
    /* static hosting: no reload endpoint */
  }
})();
