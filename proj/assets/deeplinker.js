// Progressive enhancement for server-rendered DeepLinker pages.
(function () {
  "use strict";

  function postForm(form) {
    return fetch(form.action, {
      method: "POST",
      headers: { Accept: "application/json" },
      body: new URLSearchParams(new FormData(form)),
    });
  }

  function enhanceAnnotationForm() {
    var form = document.getElementById("annotation-form");
    var list = document.getElementById("triples");
    if (!form || !list) return;
    var busy = false;
    form.addEventListener("submit", function (event) {
      event.preventDefault();
      if (busy) return;
      busy = true;
      postForm(form)
        .then(function (response) {
          return response.json().then(function (data) {
            if (!response.ok) throw new Error(data.detail || response.statusText);
            var item = document.createElement("li");
            item.dataset.predicate = data.predicate;
            item.dataset.object = data.object;
            item.textContent = data.predicate + " " + data.objectText;
            list.appendChild(item);
            form.elements.object.value = "";
          });
        })
        .catch(function (error) {
          var note = form.querySelector(".error") || form.appendChild(document.createElement("span"));
          note.className = "error";
          note.textContent = error.message;
        })
        .finally(function () {
          busy = false;
        });
    });
  }

  function enhanceBookmark() {
    var form = document.getElementById("bookmark");
    if (!form) return;
    form.addEventListener("submit", function (event) {
      event.preventDefault();
      postForm(form).then(function (response) {
        if (!response.ok) return;
        form.dataset.bookmarked = "true";
        form.querySelector("button").textContent = "Bookmarked";
      });
    });
  }

  function scaleOverlays() {
    document.querySelectorAll(".image-view").forEach(function (view) {
      var img = view.querySelector("img");
      var box = view.querySelector(".highlight");
      if (!img || !box) return;
      function place() {
        var factor = img.clientWidth / img.naturalWidth || 1;
        box.style.left = box.dataset.x * factor + "px";
        box.style.top = box.dataset.y * factor + "px";
        box.style.width = box.dataset.w * factor + "px";
        box.style.height = box.dataset.h * factor + "px";
      }
      if (img.complete) place();
      img.addEventListener("load", place);
      window.addEventListener("resize", place);
    });
  }

  document.addEventListener("DOMContentLoaded", function () {
    enhanceAnnotationForm();
    enhanceBookmark();
    scaleOverlays();
  });
})();
