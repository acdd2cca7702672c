exports.render = function (res, message) {
  res.status(500).send(message);
};

// expect: ApiParam res 1 render None -
// expect: ApiParam message 1 render XSS 2
