function greet(req, res) {
  const who = req.query.name;
  res.send('<h1>Hello ' + who + '</h1>');
}

module.exports = { greet };

// expect: ApiParam req 1 greet XSS 3
// expect: ApiParam res 1 greet None -
// expect: ParamProperty query 2 greet XSS 3
